#ifndef XOVER_DESIGN_HPP
#define XOVER_DESIGN_HPP

// Crossover-design representation, the binary / uniform-on-subjects /
// orthogonal-array predicates, OA construction, and desk-scale enumeration
// of the binary design class with p = t.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xover/types.hpp"

namespace xover {

// A p x n layout of treatment labels: entry (i, j) is the treatment given to
// subject j in period i, labels in 1..t.
struct Design {
  int t = 0;
  Eigen::MatrixXi layout; // p x n

  Design() = default;
  Design(int treatments, Eigen::MatrixXi layout_matrix);

  int p() const { return static_cast<int>(layout.rows()); }
  int n() const { return static_cast<int>(layout.cols()); }
};

// OA_I(n = lambda * t * (t-1), p = t, t, 2) request.
struct OaSpec {
  int t = 3;
  int lambda = 1;

  int n() const { return lambda * t * (t - 1); }
  int p() const { return t; }
};

struct OaCheck {
  bool is_oa = false;
  long long lambda = 0;
};

// One line per subject, p comma-separated fields, labels all integers 1..t
// or all uppercase letters A.. (not mixed). Parse errors carry the 1-based
// line number.
Design parse_design(const std::string& csv_text, int t);

// Largest label appearing in the file; lets callers omit an explicit t when
// every treatment is used at least once.
int infer_treatment_count(const std::string& csv_text);

// Inverse of parse_design; letters = true emits A.. labels (t <= 26).
std::string serialize_design(const Design& d, bool letters = false);

// True iff every treatment appears at most once in each subject's column.
bool is_binary(const Design& d);

// True iff each treatment appears exactly p/t times in every column
// (false whenever t does not divide p).
bool is_uniform_on_subjects(const Design& d);

// Orthogonal array of type I and strength 2: every ordered pair of distinct
// treatments appears in exactly lambda = n/(t(t-1)) columns for every
// ordered pair of distinct periods, and equal pairs never appear.
// Requires p = t (unsupported-shape error otherwise).
OaCheck is_oa_type1_strength2(const Design& d);

// Builds an OA_I(lambda*t*(t-1), t, t, 2). Supported: t prime with any
// lambda (cyclic columns (a + b*i) mod t); any t with lambda a multiple of
// (t-2)! (replicated all-permutations array).
Design construct_oa(const OaSpec& spec);

// All t! sequences of 1..t in lexicographic order, the column alphabet for
// binary designs with p = t.
std::vector<std::vector<int>> permutation_sequences(int t);

Design design_from_columns(int t, const std::vector<std::vector<int>>& cols);

// Number of column multisets C(n + t! - 1, t! - 1); throws SizeError when
// the count exceeds cap.
std::uint64_t binary_design_count(int t, int n, std::uint64_t cap);

// Streams one representative per multiset of permutation columns, columns
// sorted lexicographically. Restartable via reset().
class BinaryDesignEnumerator {
public:
  static constexpr std::uint64_t kDefaultCap = 10'000'000;

  BinaryDesignEnumerator(int t, int n, std::uint64_t cap = kDefaultCap);

  std::optional<Design> next();
  void reset();
  std::uint64_t total() const { return total_; }

private:
  int t_;
  int n_;
  std::uint64_t total_;
  std::vector<std::vector<int>> perms_;
  std::vector<int> idx_;
  bool exhausted_ = false;
  bool started_ = false;
};

} // namespace xover

#endif
