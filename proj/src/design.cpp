#include "xover/design.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

namespace xover {

namespace {

bool is_prime(int v) {
  if (v < 2) return false;
  for (int q = 2; q * q <= v; ++q)
    if (v % q == 0) return false;
  return true;
}

std::uint64_t factorial(int v) {
  std::uint64_t out = 1;
  for (int i = 2; i <= v; ++i) out *= static_cast<std::uint64_t>(i);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

// Label value of one field: single uppercase letter A.. or an unsigned
// integer. Flags which alphabet was used; returns 0 for anything else.
int parse_label(const std::string& field, bool& letter, bool& number) {
  if (field.size() == 1 && field[0] >= 'A' && field[0] <= 'Z') {
    letter = true;
    return field[0] - 'A' + 1;
  }
  if (!field.empty() && std::all_of(field.begin(), field.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      })) {
    number = true;
    return std::stoi(field);
  }
  return 0;
}

} // namespace

Design::Design(int treatments, Eigen::MatrixXi layout_matrix)
    : t(treatments), layout(std::move(layout_matrix)) {
  if (t < 2) throw ValidationError("Design: need t >= 2");
  if (layout.rows() < 1 || layout.cols() < 1)
    throw ValidationError("Design: need p >= 1 and n >= 1");
  for (Eigen::Index i = 0; i < layout.rows(); ++i)
    for (Eigen::Index j = 0; j < layout.cols(); ++j)
      if (layout(i, j) < 1 || layout(i, j) > t)
        throw ValidationError("Design: label out of range 1..t at period " +
                              std::to_string(i + 1) + ", subject " +
                              std::to_string(j + 1));
}

Design parse_design(const std::string& csv_text, int t) {
  if (t < 2) throw ValidationError("parse_design: need t >= 2");
  std::vector<std::vector<int>> rows; // one per subject
  std::istringstream in(csv_text);
  std::string line;
  int lineno = 0;
  bool any_letters = false;
  bool any_numbers = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = line.find_first_not_of(" \t") == std::string::npos;
    if (blank) {
      if (in.peek() == EOF) break; // trailing newline
      throw ValidationError("parse_design: blank line " + std::to_string(lineno));
    }
    std::vector<int> seq;
    for (const std::string& f : split_fields(line)) {
      if (f.empty())
        throw ValidationError("parse_design: empty field on line " +
                              std::to_string(lineno));
      const int label = parse_label(f, any_letters, any_numbers);
      if (label == 0)
        throw ValidationError("parse_design: bad label '" + f + "' on line " +
                              std::to_string(lineno));
      if (label < 1 || label > t)
        throw ValidationError("parse_design: label '" + f +
                              "' out of range 1.." + std::to_string(t) +
                              " on line " + std::to_string(lineno));
      seq.push_back(label);
    }
    if (!rows.empty() && seq.size() != rows.front().size())
      throw ValidationError("parse_design: ragged row on line " +
                            std::to_string(lineno));
    rows.push_back(std::move(seq));
  }
  if (rows.empty()) throw ValidationError("parse_design: empty input");
  if (any_letters && any_numbers)
    throw ValidationError("parse_design: mixed letter and number labels");

  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(rows.front().size());
  Eigen::MatrixXi layout(p, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < p; ++i) layout(i, j) = rows[j][i];
  return Design(t, std::move(layout));
}

int infer_treatment_count(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  int lineno = 0;
  int max_label = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    for (const std::string& f : split_fields(line)) {
      bool letter = false, number = false;
      const int label = f.empty() ? 0 : parse_label(f, letter, number);
      if (label == 0)
        throw ValidationError("infer_treatment_count: bad label '" + f +
                              "' on line " + std::to_string(lineno));
      max_label = std::max(max_label, label);
    }
  }
  if (max_label < 2)
    throw ValidationError("infer_treatment_count: no usable labels found");
  return max_label;
}

std::string serialize_design(const Design& d, bool letters) {
  if (letters && d.t > 26)
    throw ValidationError("serialize_design: letters mode needs t <= 26");
  std::string out;
  for (int j = 0; j < d.n(); ++j) {
    for (int i = 0; i < d.p(); ++i) {
      if (i) out.push_back(',');
      if (letters)
        out.push_back(static_cast<char>('A' + d.layout(i, j) - 1));
      else
        out += std::to_string(d.layout(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

bool is_binary(const Design& d) {
  for (int j = 0; j < d.n(); ++j) {
    std::vector<int> seen(d.t + 1, 0);
    for (int i = 0; i < d.p(); ++i)
      if (++seen[d.layout(i, j)] > 1) return false;
  }
  return true;
}

bool is_uniform_on_subjects(const Design& d) {
  if (d.p() % d.t != 0) return false;
  const int want = d.p() / d.t;
  for (int j = 0; j < d.n(); ++j) {
    std::vector<int> count(d.t + 1, 0);
    for (int i = 0; i < d.p(); ++i) ++count[d.layout(i, j)];
    for (int s = 1; s <= d.t; ++s)
      if (count[s] != want) return false;
  }
  return true;
}

OaCheck is_oa_type1_strength2(const Design& d) {
  if (d.p() != d.t)
    throw ValidationError("is_oa_type1_strength2: unsupported shape, needs p = t");
  const long long pairs = static_cast<long long>(d.t) * (d.t - 1);
  if (d.n() % pairs != 0) return {false, 0};
  const long long lambda = d.n() / pairs;

  std::vector<int> count(static_cast<std::size_t>(d.t) * d.t);
  for (int i = 0; i < d.p(); ++i) {
    for (int i2 = 0; i2 < d.p(); ++i2) {
      if (i == i2) continue;
      std::fill(count.begin(), count.end(), 0);
      for (int j = 0; j < d.n(); ++j)
        ++count[static_cast<std::size_t>(d.layout(i, j) - 1) * d.t +
                (d.layout(i2, j) - 1)];
      for (int a = 0; a < d.t; ++a)
        for (int b = 0; b < d.t; ++b) {
          const int c = count[static_cast<std::size_t>(a) * d.t + b];
          if (a == b ? c != 0 : c != lambda) return {false, 0};
        }
    }
  }
  return {true, lambda};
}

Design construct_oa(const OaSpec& spec) {
  if (spec.t < 3) throw ValidationError("construct_oa: need t >= 3");
  if (spec.lambda < 1) throw ValidationError("construct_oa: need lambda >= 1");

  std::vector<std::vector<int>> cols;
  if (is_prime(spec.t)) {
    // Columns (a + b*i) mod t over a in 0..t-1, b in 1..t-1: every ordered
    // pair of distinct symbols solves uniquely for (a, b) in any two rows.
    for (int rep = 0; rep < spec.lambda; ++rep)
      for (int a = 0; a < spec.t; ++a)
        for (int b = 1; b < spec.t; ++b) {
          std::vector<int> col(spec.t);
          for (int i = 0; i < spec.t; ++i) col[i] = (a + b * i) % spec.t + 1;
          cols.push_back(std::move(col));
        }
  } else {
    const std::uint64_t base = factorial(spec.t - 2);
    if (static_cast<std::uint64_t>(spec.lambda) % base != 0)
      throw ValidationError(
          "construct_oa: unsupported (t, lambda); supported cases are prime t "
          "with any lambda, or lambda a multiple of (t-2)! = " +
          std::to_string(base) + " for t = " + std::to_string(spec.t));
    const std::uint64_t reps = static_cast<std::uint64_t>(spec.lambda) / base;
    const auto perms = permutation_sequences(spec.t);
    for (std::uint64_t rep = 0; rep < reps; ++rep)
      cols.insert(cols.end(), perms.begin(), perms.end());
  }
  return design_from_columns(spec.t, cols);
}

std::vector<std::vector<int>> permutation_sequences(int t) {
  std::vector<int> seq(t);
  std::iota(seq.begin(), seq.end(), 1);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(seq);
  } while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

Design design_from_columns(int t, const std::vector<std::vector<int>>& cols) {
  if (cols.empty()) throw ValidationError("design_from_columns: no columns");
  const int p = static_cast<int>(cols.front().size());
  Eigen::MatrixXi layout(p, static_cast<int>(cols.size()));
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
    if (static_cast<int>(cols[j].size()) != p)
      throw ValidationError("design_from_columns: ragged columns");
    for (int i = 0; i < p; ++i) layout(i, j) = cols[j][i];
  }
  return Design(t, std::move(layout));
}

std::uint64_t binary_design_count(int t, int n, std::uint64_t cap) {
  // C(n + t! - 1, t! - 1) via the multiplicative formula; bail as soon as
  // the running value can exceed the cap.
  const std::uint64_t k = factorial(t) - 1; // choose k from n + k
  std::uint64_t result = 1;
  const std::uint64_t m = std::min<std::uint64_t>(k, static_cast<std::uint64_t>(n));
  constexpr std::uint64_t kHardLimit = std::uint64_t{1} << 62;
  for (std::uint64_t i = 1; i <= m; ++i) {
    const std::uint64_t numer = static_cast<std::uint64_t>(n) + k - m + i;
    // Prefix products of the multiplicative formula are exact integers, so
    // multiply-then-divide stays exact; bail before it can overflow.
    if (result > kHardLimit / numer)
      throw SizeError("binary_design_count: multiset count exceeds cap " +
                      std::to_string(cap) + "; use exchange_search instead");
    result = result * numer / i;
  }
  if (result > cap)
    throw SizeError("binary_design_count: multiset count " +
                    std::to_string(result) + " exceeds cap " +
                    std::to_string(cap) + "; use exchange_search instead");
  return result;
}

BinaryDesignEnumerator::BinaryDesignEnumerator(int t, int n, std::uint64_t cap)
    : t_(t), n_(n) {
  if (t < 2 || t > 8)
    throw ValidationError("BinaryDesignEnumerator: t out of supported range 2..8");
  if (n < 1) throw ValidationError("BinaryDesignEnumerator: need n >= 1");
  total_ = binary_design_count(t, n, cap);
  perms_ = permutation_sequences(t);
  idx_.assign(static_cast<std::size_t>(n), 0);
}

void BinaryDesignEnumerator::reset() {
  std::fill(idx_.begin(), idx_.end(), 0);
  exhausted_ = false;
  started_ = false;
}

std::optional<Design> BinaryDesignEnumerator::next() {
  if (exhausted_) return std::nullopt;
  if (started_) {
    // Advance the nondecreasing index tuple in lexicographic order.
    const int top = static_cast<int>(perms_.size()) - 1;
    int pos = n_ - 1;
    while (pos >= 0 && idx_[pos] == top) --pos;
    if (pos < 0) {
      exhausted_ = true;
      return std::nullopt;
    }
    const int next_val = idx_[pos] + 1;
    for (int j = pos; j < n_; ++j) idx_[j] = next_val;
  }
  started_ = true;

  Eigen::MatrixXi layout(t_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < t_; ++i) layout(i, j) = perms_[idx_[j]][i];
  return Design(t_, std::move(layout));
}

} // namespace xover
