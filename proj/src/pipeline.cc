#include "sdc/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>

#include "sdc/attacks.h"
#include "sdc/conf_models.h"
#include "sdc/dp.h"
#include "sdc/error.h"
#include "sdc/kanon.h"
#include "sdc/prob_kanon.h"

namespace sdc {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kConfigKeys = {
    "input",     "schema",         "hierarchies", "external",        "mechanism",
    "k",         "l",              "l_variant",   "t",               "epsilon",
    "delta",     "qi",             "conf_attribute", "max_suppression", "recoding",
    "permutation", "attacks",      "trials",      "dp_check_trials", "seed",
    "out"};

bool Contains(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool IsKFamily(const std::string& mechanism) { return mechanism != "dp_microdata"; }

bool IsRandomized(const std::string& mechanism) {
  return mechanism == "cluster_and_permute" || mechanism == "dp_microdata";
}

std::string Fixed(double x, int digits = 4) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string Dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

nlohmann::json ReadJson(const std::string& path) {
  try {
    return nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

std::vector<std::string> QiNames(const MicrodataTable& table, const RunConfig& config) {
  return config.qi_attributes.empty() ? table.AttributeNames(Role::kQuasiIdentifier)
                                      : config.qi_attributes;
}

std::string ConfAttribute(const MicrodataTable& table, const RunConfig& config) {
  if (!config.conf_attribute.empty()) return config.conf_attribute;
  const auto names = table.AttributeNames(Role::kConfidential);
  return names.empty() ? std::string() : names.front();
}

// MDAV groups, merged further when l or t is requested.
Partition ClassPartition(const MicrodataTable& table, const RunConfig& config) {
  const std::vector<std::string> qis = QiNames(table, config);
  const int k = *config.params.k;
  if (!config.params.l && !config.params.t) return MdavPartition(table, qis, k);
  const std::string conf = ConfAttribute(table, config);
  if (conf.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "l and t need a confidential attribute");
  }
  ModelTargets targets;
  targets.k = k;
  targets.l = config.params.l;
  targets.t = config.params.t;
  if (config.params.l_variant == "entropy") targets.l_variant = LDiversityVariant::kEntropy;
  targets.ground = table.attribute(table.AttributeIndex(conf)).kind == Kind::kNumeric
                       ? GroundDistance::kOrderedNumeric
                       : GroundDistance::kCategoricalUniform;
  return EnforceModels(table, qis, conf, targets);
}

// Everything the attacks need about one run.
struct Artifacts {
  RunConfig config;
  MicrodataTable original;
  HierarchyMap hierarchies;
  AnonymizedRelease release;  // the QI table for anatomy
  std::optional<MicrodataTable> conf_table;
};

// Loads the intruder's table. Rows are matched to the input's row ids through
// a shared identifier column when there is one, by position otherwise;
// unmatched rows get ids that never match.
MicrodataTable LoadExternal(const Artifacts& a, const std::string& path) {
  if (path.empty()) return a.original;
  const Schema& schema = a.original.schema();
  MicrodataTable ext = LoadTable(ReadFile(path), schema);
  std::optional<std::size_t> id_col;
  for (std::size_t j : a.original.AttributesWithRole(Role::kIdentifier)) {
    id_col = j;
    break;
  }
  if (!id_col) return ext;
  std::map<std::string, RowId> by_identifier;
  for (std::size_t i = 0; i < a.original.num_rows(); ++i) {
    by_identifier[CellText(a.original.cell(i, *id_col))] = a.original.row_id(i);
  }
  const std::size_t ej = ext.AttributeIndex(a.original.attribute(*id_col).name);
  std::vector<RowId> ids;
  for (std::size_t i = 0; i < ext.num_rows(); ++i) {
    auto it = by_identifier.find(CellText(ext.cell(i, ej)));
    ids.push_back(it != by_identifier.end() ? it->second : -1 - static_cast<RowId>(i));
  }
  return MicrodataTable(ext.schema(), ext.rows(), std::move(ids));
}

nlohmann::json Skipped(const std::string& attack, const std::string& reason) {
  return {{"attack", attack}, {"skipped", reason}};
}

nlohmann::json RunLinkage(const Artifacts& a, int trials, std::uint64_t seed,
                          const std::string& external_path) {
  if (a.config.mechanism == "anatomy") {
    return Skipped("linkage", "anatomy releases QI values unchanged; use attribute_inference");
  }
  const MicrodataTable external = LoadExternal(a, external_path);
  LinkageStrategy strategy;
  for (const std::string& name : QiNames(a.original, a.config)) {
    if (a.release.table.FindAttribute(name) && external.FindAttribute(name)) {
      strategy.qi_attributes.push_back(name);
    }
  }
  if (!a.hierarchies.empty()) strategy.hierarchies = &a.hierarchies;
  AttackReport report;
  if (IsRandomized(a.config.mechanism)) {
    const ReleaseFactory factory = [&](std::uint64_t s) {
      return Anonymize(a.original, a.config, a.hierarchies, s);
    };
    report = LinkageAttack(factory, external, strategy, trials, seed);
  } else {
    report = LinkageAttack(a.release, external, strategy, trials, seed);
  }
  nlohmann::json doc = report.ToJson();
  doc["qi_attributes"] = strategy.qi_attributes;
  doc["baseline"] = external.num_rows() > 0 && a.release.table.num_rows() > 0
                        ? 1.0 / static_cast<double>(a.release.table.num_rows())
                        : 0.0;
  if (a.config.params.k) doc["bound"] = 1.0 / *a.config.params.k;
  return doc;
}

nlohmann::json RunAttributeInference(const Artifacts& a) {
  const std::string conf = ConfAttribute(a.original, a.config);
  if (conf.empty()) return Skipped("attribute_inference", "no confidential attribute");
  if (!a.release.partition) return Skipped("attribute_inference", "release has no partition");
  const MicrodataTable& table = a.conf_table ? *a.conf_table : a.release.table;
  return AttributeInference(table, *a.release.partition, conf, ColumnDistribution(a.original, conf))
      .ToJson();
}

nlohmann::json RunDowncoding(const Artifacts& a) {
  const int k = a.config.params.k.value_or(2);
  return DowncodingAttack(a.release, a.hierarchies, k).ToJson();
}

// Neighbor pair differing in one cell of the first released attribute; the
// observed output is that cell of the DP release.
nlohmann::json RunDpCheck(const Artifacts& a, std::uint64_t seed) {
  if (a.config.mechanism != "dp_microdata") {
    return Skipped("dp_check", "release is not differentially private");
  }
  const MicrodataTable released = SuppressIdentifiers(a.original);
  if (released.num_rows() == 0 || released.num_attributes() == 0) {
    return Skipped("dp_check", "nothing released");
  }
  const std::size_t first = 0;
  const MicrodataTable t1 = released.SelectRows(std::vector<std::size_t>{first});
  const AttributeSchema& attr = t1.attribute(0);
  std::vector<std::vector<Cell>> rows = t1.rows();
  const double x = std::get<double>(rows[0][0]);
  rows[0][0] = x - attr.min >= attr.max - x ? attr.min : attr.max;
  const MicrodataTable t2 = t1.WithRows(std::move(rows));
  const double epsilon = *a.config.params.epsilon;
  const ScalarMechanism mechanism = [&](const MicrodataTable& t, Rng& rng) {
    return DpMicrodataRelease(t, epsilon, rng.NextU64()).table.number(0, 0);
  };
  const EmpiricalDpResult result = EmpiricalDpCheck(mechanism, t1, t2, epsilon, 64,
                                                    a.config.dp_check_trials, seed,
                                                    NeighborModel::kReplace);
  nlohmann::json doc = result.ToJson();
  doc["attack"] = "dp_check";
  doc["epsilon"] = epsilon;
  doc["attribute"] = attr.name;
  doc["trials"] = a.config.dp_check_trials;
  doc["seed"] = seed;
  return doc;
}

nlohmann::json RunAttack(const Artifacts& a, const std::string& name, int trials,
                         std::uint64_t seed, const std::string& external_path) {
  if (name == "linkage") return RunLinkage(a, trials, seed, external_path);
  if (name == "attribute_inference") return RunAttributeInference(a);
  if (name == "downcoding") return RunDowncoding(a);
  if (name == "dp_check") return RunDpCheck(a, seed);
  throw Error(ErrorCode::kInvalidArgument, "unknown attack '" + name + "'");
}

// Stream index of each attack, so attacks are reproducible one by one.
std::uint64_t AttackSeed(std::uint64_t seed, const std::string& name) {
  const auto it = std::find(kAttacks.begin(), kAttacks.end(), name);
  return DeriveSeed(seed, 1 + static_cast<std::uint64_t>(it - kAttacks.begin()));
}

std::vector<Query> DefaultWorkload(const MicrodataTable& table) {
  std::vector<Query> out = {Query::Count()};
  for (const AttributeSchema& a : table.schema()) {
    if (a.role == Role::kIdentifier || a.kind != Kind::kNumeric) continue;
    out.push_back(Query::Sum(a.name));
    out.push_back(Query::Mean(a.name, table.num_rows()));
  }
  return out;
}

BudgetLedger RunLedger(const RunConfig& config) {
  BudgetLedger ledger;
  LedgerEntry e;
  e.mechanism = config.mechanism;
  if (config.mechanism == "dp_microdata") {
    e.epsilon = *config.params.epsilon;
    e.delta = config.params.delta.value_or(0.0);
  } else {
    e.model = "k_anonymity";
  }
  ledger.Append(std::move(e));
  return ledger;
}

nlohmann::json InputDigests(const RunConfig& config) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const std::string* path : {&config.input, &config.schema, &config.hierarchies,
                                  &config.external}) {
    if (!path->empty()) inputs[*path] = Sha256Hex(ReadFile(*path));
  }
  return inputs;
}

std::string AnatomyRowIds(const MicrodataTable& qi, const MicrodataTable& conf) {
  return Dump({{"qi", qi.row_ids()}, {"conf", conf.row_ids()}});
}

nlohmann::json CollectAttacks(const fs::path& dir) {
  nlohmann::json attacks = nlohmann::json::object();
  if (!fs::exists(dir / "attacks")) return attacks;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir / "attacks")) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) attacks[f.stem().string()] = ReadJson(f.string());
  return attacks;
}

Artifacts LoadArtifacts(const fs::path& dir) {
  Artifacts a;
  a.config = RunConfig::FromJson(ReadJson((dir / "config.json").string()));
  a.original = LoadTable(ReadFile(a.config.input), ReadJson(a.config.schema));
  if (!a.config.hierarchies.empty()) a.hierarchies = LoadHierarchies(a.config.hierarchies);
  const nlohmann::json provenance = ReadJson((dir / "provenance.json").string());
  const nlohmann::json ids = ReadJson((dir / "private" / "row_ids.json").string());
  if (a.config.mechanism == "anatomy") {
    const auto qi_ids = ids.at("qi").get<std::vector<RowId>>();
    const auto conf_ids = ids.at("conf").get<std::vector<RowId>>();
    a.release = ReleaseFromFiles(ReadFile((dir / "qi.csv").string()), provenance, &qi_ids);
    const MicrodataTable conf =
        LoadTable(ReadFile((dir / "conf.csv").string()), provenance.at("conf_schema"));
    a.conf_table = MicrodataTable(conf.schema(), conf.rows(), conf_ids);
  } else {
    const auto row_ids = ids.get<std::vector<RowId>>();
    a.release = ReleaseFromFiles(ReadFile((dir / "release.csv").string()), provenance, &row_ids);
  }
  return a;
}

EffectiveBudget LoadBudget(const fs::path& dir) {
  const fs::path path = dir / "ledger.jsonl";
  if (!fs::exists(path)) return {};
  return BudgetLedger::FromJsonLines(ReadFile(path.string())).Effective();
}

}  // namespace

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json doc;
  doc["input"] = input;
  doc["schema"] = schema;
  doc["hierarchies"] = hierarchies;
  doc["external"] = external;
  doc["mechanism"] = mechanism;
  const nlohmann::json p = params.ToJson();
  for (const char* key : {"k", "l", "l_variant", "t", "epsilon", "delta"}) {
    if (p.contains(key)) doc[key] = p[key];
  }
  doc["qi"] = qi_attributes;
  doc["conf_attribute"] = conf_attribute;
  doc["max_suppression"] = max_suppression;
  doc["recoding"] = recoding;
  doc["permutation"] = permutation;
  doc["attacks"] = attacks;
  doc["trials"] = trials;
  doc["dp_check_trials"] = dp_check_trials;
  doc["seed"] = seed;
  doc["out"] = out_dir;
  return doc;
}

RunConfig RunConfig::FromJson(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kConfigKeys.contains(key)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
    }
  }
  RunConfig c;
  try {
    c.input = doc.value("input", c.input);
    c.schema = doc.value("schema", c.schema);
    c.hierarchies = doc.value("hierarchies", c.hierarchies);
    c.external = doc.value("external", c.external);
    c.mechanism = doc.value("mechanism", c.mechanism);
    nlohmann::json p = nlohmann::json::object();
    for (const char* key : {"k", "l", "l_variant", "t", "epsilon", "delta"}) {
      if (doc.contains(key) && !doc[key].is_null()) p[key] = doc[key];
    }
    c.params = PrivacyParams::FromJson(p);
    c.qi_attributes = doc.value("qi", c.qi_attributes);
    c.conf_attribute = doc.value("conf_attribute", c.conf_attribute);
    c.max_suppression = doc.value("max_suppression", c.max_suppression);
    c.recoding = doc.value("recoding", c.recoding);
    c.permutation = doc.value("permutation", c.permutation);
    c.attacks = doc.value("attacks", c.attacks);
    c.trials = doc.value("trials", c.trials);
    c.dp_check_trials = doc.value("dp_check_trials", c.dp_check_trials);
    c.seed = doc.value("seed", c.seed);
    c.out_dir = doc.value("out", c.out_dir);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  return c;
}

void RunConfig::Validate() const {
  if (!Contains(kMechanisms, mechanism)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown mechanism '" + mechanism + "'");
  }
  for (const std::string& a : attacks) {
    if (!Contains(kAttacks, a)) throw Error(ErrorCode::kInvalidArgument, "unknown attack '" + a + "'");
  }
  params.Validate();
  if (trials < 1 || dp_check_trials < 1) {
    throw Error(ErrorCode::kInvalidArgument, "trials must be positive");
  }
  if (!(max_suppression >= 0 && max_suppression <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "max_suppression must lie in [0, 1]");
  }
  if (recoding != "local" && recoding != "global") {
    throw Error(ErrorCode::kInvalidArgument, "recoding must be 'local' or 'global'");
  }
  if (permutation != "vector" && permutation != "per_attribute") {
    throw Error(ErrorCode::kInvalidArgument, "permutation must be 'vector' or 'per_attribute'");
  }
  if (IsKFamily(mechanism) && !params.k) {
    throw Error(ErrorCode::kInvalidArgument, mechanism + " needs k");
  }
  if (mechanism == "dp_microdata" && !(params.epsilon && *params.epsilon > 0)) {
    throw Error(ErrorCode::kNonPositiveEpsilon, "dp_microdata needs epsilon > 0");
  }
  if ((mechanism == "generalization" || mechanism == "minimal_generalization") &&
      hierarchies.empty()) {
    throw Error(ErrorCode::kHierarchyMissing, mechanism + " needs a hierarchies file");
  }
  if ((params.l || params.t) && mechanism != "mdav" && mechanism != "cluster_and_permute" &&
      mechanism != "anatomy") {
    throw Error(ErrorCode::kInvalidArgument,
                "l and t apply to mdav, cluster_and_permute and anatomy");
  }
  if (input.empty() || schema.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "input and schema are required");
  }
  for (const std::string* path : {&input, &schema, &hierarchies, &external}) {
    if (!path->empty() && !fs::is_regular_file(*path)) {
      throw Error(ErrorCode::kIo, *path + ": no such file");
    }
  }
}

HierarchyMap LoadHierarchies(const std::string& path) {
  const nlohmann::json doc = ReadJson(path);
  HierarchyMap out;
  const nlohmann::json list = doc.is_array() ? doc : nlohmann::json::array({doc});
  for (const auto& item : list) {
    GeneralizationHierarchy h = GeneralizationHierarchy::FromJson(item);
    const std::string name = h.attribute();
    if (!out.emplace(name, std::move(h)).second) {
      throw Error(ErrorCode::kInvalidHierarchy, path + ": two hierarchies for '" + name + "'");
    }
  }
  return out;
}

AnonymizedRelease Anonymize(const MicrodataTable& table, const RunConfig& config,
                            const HierarchyMap& hierarchies, std::uint64_t seed) {
  const std::vector<std::string> qis = QiNames(table, config);
  const int k = config.params.k.value_or(0);
  AnonymizedRelease release;
  if (config.mechanism == "generalization") {
    release = AnonymizeGeneralization(table, hierarchies, k, config.max_suppression).release;
  } else if (config.mechanism == "minimal_generalization") {
    release = MinimalGeneralization(table, hierarchies, k,
                                    config.recoding == "global" ? Recoding::kGlobal
                                                                : Recoding::kLocal)
                  .release;
  } else if (config.mechanism == "mdav") {
    release = Microaggregate(table, qis, ClassPartition(table, config), k).release;
  } else if (config.mechanism == "cluster_and_permute") {
    release = ClusterAndPermute(table, qis, ClassPartition(table, config), k, seed,
                                config.permutation == "vector" ? PermutationMode::kVector
                                                               : PermutationMode::kPerAttribute);
  } else if (config.mechanism == "dp_microdata") {
    release = DpMicrodataRelease(table, *config.params.epsilon, seed);
  } else {
    throw Error(ErrorCode::kInvalidArgument, config.mechanism + " does not yield one table");
  }
  release.provenance.params = config.params;
  release.provenance.seed = seed;
  return release;
}

std::string Summarize(const nlohmann::json& provenance, const nlohmann::json& attacks,
                      const nlohmann::json& utility, const EffectiveBudget& budget) {
  std::string out = "run summary\n";
  const std::string mechanism = provenance.value("mechanism", "");
  const nlohmann::json params = provenance.value("params", nlohmann::json::object());
  out += "mechanism: " + mechanism + "\n";
  out += "seed: " + std::to_string(provenance.value("seed", std::uint64_t{0})) + "\n";
  out += "rows released: " + std::to_string(provenance.value("rows", 0)) + "\n";

  const bool dp = params.contains("epsilon") && mechanism == "dp_microdata";
  std::optional<double> bound;
  if (dp) {
    const double eps = params["epsilon"].get<double>();
    if (eps <= kEmpiricalCheckEpsilon) {
      out += "ex ante: epsilon-DP with epsilon = " + Fixed(eps) + " (guaranteed, epsilon <= 1)\n";
    } else {
      out += "ex ante: epsilon-DP with epsilon = " + Fixed(eps) +
             " (empirical check required, epsilon > 1)\n";
    }
  } else if (params.contains("k")) {
    const int k = params["k"].get<int>();
    bound = 1.0 / k;
    out += "ex ante: reidentification risk at most 1/k = " + Fixed(*bound) + " (k = " +
           std::to_string(k) + ")\n";
    if (params.contains("l")) {
      out += "ex ante: every class " + params.value("l_variant", std::string("distinct")) +
             " l-diverse with l = " + Fixed(params["l"].get<double>()) + "\n";
    }
    if (params.contains("t")) {
      out += "ex ante: every class within EMD t = " + Fixed(params["t"].get<double>()) +
             " of the whole table\n";
    }
  }

  for (const auto& [name, report] : attacks.items()) {
    if (report.contains("skipped")) {
      out += name + ": skipped (" + report["skipped"].get<std::string>() + ")\n";
      continue;
    }
    if (name == "linkage") {
      const double rate = report["success_rate"].get<double>();
      const double hi = report["ci95"][1].get<double>();
      out += "ex post: linkage success " + Fixed(rate) + " (95% CI " +
             Fixed(report["ci95"][0].get<double>()) + " to " + Fixed(hi) + "; " +
             std::to_string(report["trials"].get<int>()) + " trials, seed " +
             std::to_string(report["seed"].get<std::uint64_t>()) + ")\n";
      if (bound) {
        out += std::string("  ") +
               (hi <= *bound + 0.02 ? "within the ex-ante bound" : "exceeds the ex-ante bound") +
               "\n";
      } else {
        out += "  random-guess baseline " + Fixed(report.value("baseline", 0.0)) + "\n";
      }
    } else if (name == "attribute_inference") {
      out += "attribute inference on " + report["attribute"].get<std::string>() +
             ": max gain " + Fixed(report["max_gain"].get<double>()) + " (" +
             std::to_string(report["flagged_classes"].get<std::size_t>()) + " of " +
             std::to_string(report["classes"].size()) + " classes flagged)\n";
    } else if (name == "downcoding") {
      out += "downcoding: recovery score " + Fixed(report["recovery_score"].get<double>()) +
             " over " + std::to_string(report["preimages"].get<std::uint64_t>()) +
             " preimages\n";
    } else if (name == "dp_check") {
      const nlohmann::json& r = report["max_log_ratio"];
      out += "empirical DP check: max log ratio " +
             (r.is_number() ? Fixed(r.get<double>()) : r.get<std::string>()) + " vs epsilon " +
             Fixed(report["epsilon"].get<double>()) + " plus sampling slack " +
             Fixed(report.value("slack", 0.0)) + ": " + report["verdict"].get<std::string>() +
             "\n";
    }
  }

  if (utility.is_object() && utility.contains("sse")) {
    out += "utility: standardized SSE " + Fixed(utility["sse"]["standardized"].get<double>());
    std::string worst;
    double worst_d = -1.0;
    for (const auto& [name, d] : utility["marginal_distance"].items()) {
      if (d.get<double>() > worst_d) worst_d = d.get<double>(), worst = name;
    }
    if (!worst.empty()) out += "; max marginal distance " + Fixed(worst_d) + " (" + worst + ")";
    out += "\n";
  }

  if (!budget.defined) {
    out += "budget: composition undefined for k-anonymity releases\n";
  } else {
    out += "budget: effective epsilon " + Fixed(budget.epsilon) + ", delta " +
           Fixed(budget.delta, 6) + "\n";
  }
  for (const std::string& w : budget.warnings) out += "warning: " + w + "\n";
  return out;
}

void WriteManifest(const std::string& dir, const nlohmann::json& inputs) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (rel != "manifest.json") files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  nlohmann::json listing = nlohmann::json::object();
  for (const std::string& f : files) listing[f] = Sha256Hex(ReadFile((fs::path(dir) / f).string()));
  const nlohmann::json manifest = {
      {"toolkit_version", SDC_VERSION}, {"inputs", inputs}, {"files", std::move(listing)}};
  WriteFile((fs::path(dir) / "manifest.json").string(), Dump(manifest));
}

RunResult Run(const RunConfig& config) {
  config.Validate();
  Artifacts a;
  a.config = config;
  a.original = LoadTable(ReadFile(config.input), ReadJson(config.schema));
  if (!config.hierarchies.empty()) a.hierarchies = LoadHierarchies(config.hierarchies);
  const nlohmann::json inputs = InputDigests(config);

  const fs::path dir = config.out_dir;
  fs::remove_all(dir / "attacks");
  for (const char* stale : {"release.csv", "qi.csv", "conf.csv"}) fs::remove(dir / stale);
  fs::create_directories(dir / "attacks");
  fs::create_directories(dir / "private");

  RunResult result;
  if (config.mechanism == "anatomy") {
    const Partition partition = ClassPartition(a.original, config);
    AnatomyRelease anatomy = Anatomize(a.original, partition, *config.params.k, config.seed);
    a.release.table = anatomy.qi_table;
    a.release.partition = anatomy.partition;
    a.release.provenance = anatomy.provenance;
    a.release.provenance.params = config.params;
    a.conf_table = anatomy.conf_table;
    WriteFile((dir / "qi.csv").string(), SerializeTable(anatomy.qi_table));
    WriteFile((dir / "conf.csv").string(), SerializeTable(anatomy.conf_table));
    WriteFile((dir / "private" / "row_ids.json").string(),
              AnatomyRowIds(anatomy.qi_table, anatomy.conf_table));
    result.provenance = ProvenanceToJson(a.release);
    result.provenance["conf_schema"] = SchemaToJson(anatomy.conf_table.schema());
    result.provenance["files"] = {"qi.csv", "conf.csv"};
  } else {
    a.release = Anonymize(a.original, config, a.hierarchies, config.seed);
    ValidateRelease(a.release);
    WriteFile((dir / "release.csv").string(), SerializeTable(a.release.table));
    WriteFile((dir / "private" / "row_ids.json").string(), Dump(a.release.table.row_ids()));
    result.provenance = ProvenanceToJson(a.release);
  }
  result.provenance["inputs"] = inputs;
  WriteFile((dir / "provenance.json").string(), Dump(result.provenance));

  for (const std::string& name : config.attacks) {
    nlohmann::json report =
        RunAttack(a, name, config.trials, AttackSeed(config.seed, name), config.external);
    WriteFile((dir / "attacks" / (name + ".json")).string(), Dump(report));
    result.attacks[name] = std::move(report);
  }

  const std::vector<Query> workload = DefaultWorkload(a.original);
  result.utility = ComputeUtility(a.original, a.release.table, workload).ToJson();
  WriteFile((dir / "utility.json").string(), Dump(result.utility));

  const BudgetLedger ledger = RunLedger(config);
  WriteFile((dir / "ledger.jsonl").string(), ledger.ToJsonLines());
  result.budget = ledger.Effective();

  result.summary = Summarize(result.provenance, result.attacks, result.utility, result.budget);
  WriteFile((dir / "summary.txt").string(), result.summary);
  WriteFile((dir / "config.json").string(), Dump(config.ToJson()));
  WriteManifest(dir.string(), inputs);
  return result;
}

nlohmann::json AttackRunDirectory(const std::string& run_dir, const std::string& attack,
                                  int trials, std::uint64_t seed, const std::string& external) {
  if (!Contains(kAttacks, attack)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown attack '" + attack + "'");
  }
  if (trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be positive");
  const fs::path dir = run_dir;
  const Artifacts a = LoadArtifacts(dir);
  nlohmann::json report = RunAttack(a, attack, trials, seed, external);
  fs::create_directories(dir / "attacks");
  WriteFile((dir / "attacks" / (attack + ".json")).string(), Dump(report));
  ReportRunDirectory(run_dir);
  return report;
}

std::string ReportRunDirectory(const std::string& run_dir) {
  const fs::path dir = run_dir;
  const nlohmann::json provenance = ReadJson((dir / "provenance.json").string());
  nlohmann::json utility;
  if (fs::exists(dir / "utility.json")) utility = ReadJson((dir / "utility.json").string());
  const std::string summary =
      Summarize(provenance, CollectAttacks(dir), utility, LoadBudget(dir));
  WriteFile((dir / "summary.txt").string(), summary);
  nlohmann::json inputs = nlohmann::json::object();
  if (fs::exists(dir / "manifest.json")) {
    inputs = ReadJson((dir / "manifest.json").string()).value("inputs", inputs);
  }
  WriteManifest(run_dir, inputs);
  return summary;
}

std::vector<SweepPoint> Sweep(const RunConfig& config, const std::vector<double>& values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one value");
  const bool dp = config.mechanism == "dp_microdata";
  const std::string parameter = dp ? "epsilon" : "k";
  std::vector<SweepPoint> points;
  std::string csv = "parameter,value,linkage_rate,linkage_upper,sse_standardized,max_marginal_distance\n";
  for (double v : values) {
    RunConfig c = config;
    if (dp) {
      c.params.epsilon = v;
    } else {
      if (v != std::floor(v)) throw Error(ErrorCode::kInvalidArgument, "k must be an integer");
      c.params.k = static_cast<int>(v);
    }
    if (!Contains(c.attacks, "linkage")) c.attacks.push_back("linkage");
    c.out_dir = (fs::path(config.out_dir) / (parameter + "=" + FormatNumber(v))).string();
    const RunResult r = Run(c);
    SweepPoint p;
    p.parameter = parameter;
    p.value = v;
    const nlohmann::json& link = r.attacks["linkage"];
    if (!link.contains("skipped")) {
      p.linkage_rate = link["success_rate"].get<double>();
      p.linkage_upper = link["ci95"][1].get<double>();
    }
    p.sse_standardized = r.utility["sse"]["standardized"].get<double>();
    for (const auto& [name, d] : r.utility["marginal_distance"].items()) {
      p.max_marginal_distance = std::max(p.max_marginal_distance, d.get<double>());
    }
    csv += parameter + "," + FormatNumber(v) + "," + FormatNumber(p.linkage_rate) + "," +
           FormatNumber(p.linkage_upper) + "," + FormatNumber(p.sse_standardized) + "," +
           FormatNumber(p.max_marginal_distance) + "\n";
    points.push_back(p);
  }
  WriteFile((fs::path(config.out_dir) / "sweep.csv").string(), csv);
  WriteManifest(config.out_dir, InputDigests(config));
  return points;
}

}  // namespace sdc
