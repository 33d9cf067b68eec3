#include "sdc/release.h"

#include <cmath>
#include <cstdio>
#include <set>

#include <openssl/evp.h>

#include "sdc/error.h"

namespace sdc {

void PrivacyParams::Validate() const {
  auto bad = [](const std::string& what) { return Error(ErrorCode::kInvalidArgument, what); };
  if (k && *k < 1) throw bad("k must be >= 1");
  if (l && !(*l >= 1)) throw bad("l must be >= 1");
  if (l_variant && *l_variant != "distinct" && *l_variant != "entropy") {
    throw bad("l variant must be 'distinct' or 'entropy'");
  }
  if (t && !(*t >= 0 && *t <= 1)) throw bad("t must lie in [0, 1]");
  if (epsilon && !(*epsilon >= 0)) throw bad("epsilon must be >= 0");
  if (delta && !(*delta >= 0 && *delta < 1)) throw bad("delta must lie in [0, 1)");
  if (alpha && !(*alpha > 1)) throw bad("alpha must be > 1");
  if (rho && !(*rho > 0)) throw bad("rho must be > 0");
}

nlohmann::json PrivacyParams::ToJson() const {
  nlohmann::json doc = nlohmann::json::object();
  if (k) doc["k"] = *k;
  if (l) doc["l"] = *l;
  if (l_variant) doc["l_variant"] = *l_variant;
  if (t) doc["t"] = *t;
  if (epsilon) doc["epsilon"] = *epsilon;
  if (delta) doc["delta"] = *delta;
  if (alpha) doc["alpha"] = *alpha;
  if (rho) doc["rho"] = *rho;
  return doc;
}

PrivacyParams PrivacyParams::FromJson(const nlohmann::json& doc) {
  PrivacyParams p;
  if (doc.contains("k")) p.k = doc["k"].get<int>();
  if (doc.contains("l")) p.l = doc["l"].get<double>();
  if (doc.contains("l_variant")) p.l_variant = doc["l_variant"].get<std::string>();
  if (doc.contains("t")) p.t = doc["t"].get<double>();
  if (doc.contains("epsilon")) p.epsilon = doc["epsilon"].get<double>();
  if (doc.contains("delta")) p.delta = doc["delta"].get<double>();
  if (doc.contains("alpha")) p.alpha = doc["alpha"].get<double>();
  if (doc.contains("rho")) p.rho = doc["rho"].get<double>();
  p.Validate();
  return p;
}

std::map<RowId, std::size_t> Partition::GroupIndex() const {
  std::map<RowId, std::size_t> index;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (RowId id : groups[g]) {
      if (!index.emplace(id, g).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "row " + std::to_string(id) + " appears in two groups");
      }
    }
  }
  return index;
}

std::vector<std::size_t> Partition::GroupSizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(groups.size());
  for (const auto& g : groups) sizes.push_back(g.size());
  return sizes;
}

void ValidateRelease(const AnonymizedRelease& release) {
  for (const AttributeSchema& a : release.table.schema()) {
    if (a.role == Role::kIdentifier) {
      throw Error(ErrorCode::kInvalidArgument,
                  "identifier attribute '" + a.name + "' present in release");
    }
  }
  if (!release.partition) return;
  const auto index = release.partition->GroupIndex();
  const std::set<RowId> rows(release.table.row_ids().begin(), release.table.row_ids().end());
  if (index.size() != rows.size()) {
    throw Error(ErrorCode::kInvalidArgument, "partition does not cover the released rows");
  }
  for (const auto& [id, g] : index) {
    if (!rows.contains(id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "partition names row " + std::to_string(id) + " absent from the release");
    }
  }
}

nlohmann::json ProvenanceToJson(const AnonymizedRelease& release) {
  nlohmann::json doc;
  doc["toolkit_version"] = SDC_VERSION;
  doc["mechanism"] = release.provenance.mechanism;
  doc["params"] = release.provenance.params.ToJson();
  doc["seed"] = release.provenance.seed;
  doc["details"] = release.provenance.details;
  doc["schema"] = SchemaToJson(release.table.schema());
  nlohmann::json order = nlohmann::json::array();
  for (const AttributeSchema& a : release.table.schema()) order.push_back(a.name);
  doc["columns"] = std::move(order);
  doc["rows"] = release.table.num_rows();
  if (release.partition) {
    std::map<RowId, std::size_t> position;
    for (std::size_t i = 0; i < release.table.num_rows(); ++i) {
      position[release.table.row_id(i)] = i;
    }
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : release.partition->groups) {
      nlohmann::json members = nlohmann::json::array();
      for (RowId id : g) members.push_back(position.at(id));
      groups.push_back(std::move(members));
    }
    doc["partition"] = std::move(groups);
  }
  return doc;
}

AnonymizedRelease ReleaseFromFiles(std::string_view csv, const nlohmann::json& provenance,
                                   const std::vector<RowId>* row_ids) {
  AnonymizedRelease release;
  const MicrodataTable loaded = LoadTable(csv, provenance.at("schema"));
  std::vector<RowId> ids(loaded.num_rows());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = row_ids != nullptr ? row_ids->at(i) : static_cast<RowId>(i);
  }
  release.table = MicrodataTable(loaded.schema(), loaded.rows(), ids);
  release.provenance.mechanism = provenance.at("mechanism").get<std::string>();
  release.provenance.params = PrivacyParams::FromJson(provenance.value("params", nlohmann::json::object()));
  release.provenance.seed = provenance.value("seed", std::uint64_t{0});
  release.provenance.details = provenance.value("details", nlohmann::json::object());
  if (provenance.contains("partition")) {
    Partition p;
    for (const auto& g : provenance["partition"]) {
      std::vector<RowId> members;
      for (const auto& pos : g) members.push_back(ids.at(pos.get<std::size_t>()));
      p.groups.push_back(std::move(members));
    }
    release.partition = std::move(p);
  }
  ValidateRelease(release);
  return release;
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace sdc
