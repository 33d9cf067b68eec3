// sdc: anonymize microdata, attack the release, account for the budget.
//
// Exit status: 0 on success, 2 when the privacy targets cannot be met,
// 1 on input errors.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdc/error.h"
#include "sdc/ledger.h"
#include "sdc/pipeline.h"
#include "sdc/table.h"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;

std::uint64_t DefaultSeed() {
  const char* env = std::getenv("SDC_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw sdc::Error(sdc::ErrorCode::kInvalidArgument,
                     std::string("SDC_SEED is not an unsigned integer: ") + env);
  }
}

// Flags shared by `anonymize` and `sweep`; values only apply when given.
struct RunFlags {
  std::string config;
  std::string input, schema, hierarchies, external, mechanism, conf_attribute;
  std::string recoding, permutation, out, l_variant;
  std::vector<std::string> qi, attacks;
  int k = 0, trials = 0;
  double l = 0, t = 0, epsilon = 0, delta = 0, max_suppression = 0;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> options;

  void Register(CLI::App* app) {
    app->add_option("--config", config, "JSON run config; flags override its fields")
        ->check(CLI::ExistingFile);
    auto add = [&](const char* name, auto& target, const char* help) {
      options.push_back(app->add_option(name, target, help));
    };
    add("--input", input, "microdata CSV");
    add("--schema", schema, "schema JSON");
    add("--hierarchies", hierarchies, "generalization hierarchies JSON");
    add("--external", external, "intruder's table for linkage (default: the input)");
    add("--mechanism", mechanism,
        "generalization | minimal_generalization | mdav | cluster_and_permute | anatomy | "
        "dp_microdata");
    add("--k", k, "k for the k-anonymity family");
    add("--l", l, "l-diversity target");
    add("--l-variant", l_variant, "distinct | entropy");
    add("--t", t, "t-closeness target");
    add("--epsilon", epsilon, "DP budget");
    add("--delta", delta, "DP delta");
    options.push_back(app->add_option("--qi", qi, "quasi-identifiers (default: schema roles)")
                          ->delimiter(','));
    add("--conf-attribute", conf_attribute, "confidential attribute for inference attacks");
    add("--max-suppression", max_suppression, "fraction of rows generalization may suppress");
    add("--recoding", recoding, "local | global (minimal_generalization)");
    add("--permutation", permutation, "vector | per_attribute (cluster_and_permute)");
    options.push_back(app->add_option("--attack", attacks,
                                      "linkage | attribute_inference | downcoding | dp_check")
                          ->delimiter(','));
    add("--trials", trials, "attack trials");
    add("--seed", seed, "random seed (default: $SDC_SEED or 0)");
    add("--out", out, "run directory");
  }

  bool Given(const char* name) const {
    for (const CLI::Option* o : options) {
      if (o->check_lname(std::string(name).substr(2)) && o->count() > 0) return true;
    }
    return false;
  }

  sdc::RunConfig Build() const {
    sdc::RunConfig c;
    bool seed_from_config = false;
    if (!config.empty()) {
      const nlohmann::json doc = nlohmann::json::parse(sdc::ReadFile(config));
      c = sdc::RunConfig::FromJson(doc);
      seed_from_config = doc.contains("seed");
    }
    if (!seed_from_config) c.seed = DefaultSeed();
    if (Given("--input")) c.input = input;
    if (Given("--schema")) c.schema = schema;
    if (Given("--hierarchies")) c.hierarchies = hierarchies;
    if (Given("--external")) c.external = external;
    if (Given("--mechanism")) c.mechanism = mechanism;
    if (Given("--k")) c.params.k = k;
    if (Given("--l")) c.params.l = l;
    if (Given("--l-variant")) c.params.l_variant = l_variant;
    if (Given("--t")) c.params.t = t;
    if (Given("--epsilon")) c.params.epsilon = epsilon;
    if (Given("--delta")) c.params.delta = delta;
    if (Given("--qi")) c.qi_attributes = qi;
    if (Given("--conf-attribute")) c.conf_attribute = conf_attribute;
    if (Given("--max-suppression")) c.max_suppression = max_suppression;
    if (Given("--recoding")) c.recoding = recoding;
    if (Given("--permutation")) c.permutation = permutation;
    if (Given("--attack")) c.attacks = attacks;
    if (Given("--trials")) c.trials = trials;
    if (Given("--seed")) c.seed = seed;
    if (Given("--out")) c.out_dir = out;
    return c;
  }
};

// "mechanism:epsilon[:delta[:group]]"
sdc::LedgerEntry ParseEntry(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() < 2 || parts.size() > 4) {
    throw sdc::Error(sdc::ErrorCode::kInvalidArgument,
                     "ledger entry '" + text + "' is not mechanism:epsilon[:delta[:group]]");
  }
  sdc::LedgerEntry e;
  e.mechanism = parts[0];
  try {
    if (parts[1] == "k_anonymity") {
      e.model = "k_anonymity";
    } else {
      e.epsilon = std::stod(parts[1]);
    }
    if (parts.size() > 2 && !parts[2].empty()) e.delta = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw sdc::Error(sdc::ErrorCode::kInvalidArgument, "ledger entry '" + text + "' has a bad number");
  }
  if (parts.size() > 3) e.disjoint_group = parts[3];
  return e;
}

std::string ParseValues(const std::string& text, std::vector<double>& out) {
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ',');) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw sdc::Error(sdc::ErrorCode::kInvalidArgument, "bad sweep value '" + part + "'");
    }
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical disclosure control: anonymize, attack, account, report, sweep"};
  app.require_subcommand(1);

  RunFlags anonymize_flags;
  CLI::App* anonymize = app.add_subcommand("anonymize", "release a protected table and report");
  anonymize_flags.Register(anonymize);

  std::string run_dir, attack_name, attack_external;
  int attack_trials = 1000;
  std::uint64_t attack_seed = 0;
  CLI::App* attack = app.add_subcommand("attack", "run one attack against a run directory");
  attack->add_option("--run-dir", run_dir, "run directory")->required();
  attack->add_option("--name", attack_name, "linkage | attribute_inference | downcoding | dp_check")
      ->required();
  attack->add_option("--trials", attack_trials, "trials")->capture_default_str();
  CLI::Option* attack_seed_opt =
      attack->add_option("--seed", attack_seed, "random seed (default: $SDC_SEED or 0)");
  attack->add_option("--external", attack_external, "intruder's table (default: the input)");

  std::vector<std::string> ledgers, additions;
  CLI::App* account = app.add_subcommand("account", "compose privacy budgets");
  account->add_option("--ledger", ledgers, "JSON-lines ledgers; additions go to the first")
      ->required();
  account->add_option("--add", additions, "append mechanism:epsilon[:delta[:group]]");

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "rebuild and print a run's summary");
  report->add_option("--run-dir", report_dir, "run directory")->required();

  RunFlags sweep_flags;
  std::string sweep_values;
  CLI::App* sweep = app.add_subcommand("sweep", "risk/utility over a grid of k or epsilon");
  sweep_flags.Register(sweep);
  sweep->add_option("--values", sweep_values, "comma-separated k or epsilon values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*anonymize) {
      const sdc::RunResult result = sdc::Run(anonymize_flags.Build());
      std::cout << result.summary;
    } else if (*attack) {
      const std::uint64_t seed = attack_seed_opt->count() > 0 ? attack_seed : DefaultSeed();
      const nlohmann::json result =
          sdc::AttackRunDirectory(run_dir, attack_name, attack_trials, seed, attack_external);
      std::cout << result.dump(2) << "\n";
    } else if (*account) {
      sdc::BudgetLedger combined;
      for (const std::string& path : ledgers) {
        std::string text;
        if (std::filesystem::exists(path)) text = sdc::ReadFile(path);
        for (const sdc::LedgerEntry& e : sdc::BudgetLedger::FromJsonLines(text).entries()) {
          combined.Append(e);
        }
      }
      if (!additions.empty()) {
        sdc::BudgetLedger first;
        if (std::filesystem::exists(ledgers.front())) {
          first = sdc::BudgetLedger::FromJsonLines(sdc::ReadFile(ledgers.front()));
        }
        for (const std::string& a : additions) {
          const sdc::LedgerEntry e = ParseEntry(a);
          first.Append(e);
          combined.Append(e);
        }
        sdc::WriteFile(ledgers.front(), first.ToJsonLines());
      }
      std::cout << combined.Effective().ToJson().dump(2) << "\n";
    } else if (*report) {
      std::cout << sdc::ReportRunDirectory(report_dir);
    } else if (*sweep) {
      std::vector<double> values;
      ParseValues(sweep_values, values);
      const auto points = sdc::Sweep(sweep_flags.Build(), values);
      std::cout << "parameter,value,linkage_rate,linkage_upper,sse_standardized\n";
      for (const auto& p : points) {
        std::cout << p.parameter << "," << sdc::FormatNumber(p.value) << ","
                  << sdc::FormatNumber(p.linkage_rate) << "," << sdc::FormatNumber(p.linkage_upper)
                  << "," << sdc::FormatNumber(p.sse_standardized) << "\n";
      }
    }
  } catch (const sdc::Error& e) {
    std::cerr << "sdc: " << e.what() << "\n";
    return sdc::IsInfeasibility(e.code()) ? kExitInfeasible : kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "sdc: invalid JSON: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "sdc: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
