#ifndef SDC_PROB_KANON_H_
#define SDC_PROB_KANON_H_

#include <cstdint>
#include <span>
#include <string>

#include "sdc/attacks.h"
#include "sdc/release.h"
#include "sdc/table.h"

namespace sdc {

enum class PermutationMode {
  kVector,        // whole QI vectors are permuted within a cluster
  kPerAttribute,  // each QI column is permuted independently
};

// MDAV clusters of size >= k, then a uniform random permutation of the QI
// values inside every cluster. Cluster g draws from Rng(seed).Fork(g)
// (Fork(g).Fork(a) per attribute a in kPerAttribute mode), so the output is
// a pure function of the seed.
AnonymizedRelease ClusterAndPermute(const MicrodataTable& table,
                                    std::span<const std::string> qi_attributes, int k,
                                    std::uint64_t seed,
                                    PermutationMode mode = PermutationMode::kVector);
// Same permutation over a given partition of at-least-k groups.
AnonymizedRelease ClusterAndPermute(const MicrodataTable& table,
                                    std::span<const std::string> qi_attributes,
                                    const Partition& partition, int k, std::uint64_t seed,
                                    PermutationMode mode = PermutationMode::kVector);

// Anatomy: the QI table (group id, QIs, non-confidential attributes) and the
// confidential table (group id, confidential attributes) share only the
// group id. Confidential rows are shuffled inside each group. Both tables
// keep the original row ids for scoring.
struct AnatomyRelease {
  MicrodataTable qi_table;
  MicrodataTable conf_table;
  Partition partition;
  Provenance provenance;
};

AnatomyRelease Anatomize(const MicrodataTable& table, const Partition& partition, int k,
                         std::uint64_t seed);

struct ProbabilisticKReport {
  double bound = 0.0;             // 1/k + slack
  double max_record_rate = 0.0;   // worst record's empirical success rate
  // Simultaneous (Bonferroni over records) interval for the worst record.
  ConfidenceInterval max_record_interval;
  AttackReport linkage;
  // Aggregate upper bound within `bound`, and no record significantly above
  // it (worst record's simultaneous lower bound within `bound`).
  bool pass = false;
};

// Re-identification experiment: every trial draws a fresh release and links
// each external record to it.
ProbabilisticKReport VerifyProbabilisticK(const ReleaseFactory& mechanism,
                                          const MicrodataTable& external, int k, int trials,
                                          std::uint64_t seed, double slack = 0.02,
                                          const LinkageStrategy& strategy = {});
// Same experiment against one fixed release (deterministic mechanisms).
ProbabilisticKReport VerifyProbabilisticK(const AnonymizedRelease& release,
                                          const MicrodataTable& external, int k, int trials,
                                          std::uint64_t seed, double slack = 0.02,
                                          const LinkageStrategy& strategy = {});

}  // namespace sdc

#endif  // SDC_PROB_KANON_H_
