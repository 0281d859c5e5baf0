#pragma once

#include "dimincr/exact.hpp"
#include "dimincr/multi_index.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dimincr {

enum class SpaceKind { FullGrid, HyperbolicCross, LpBall, SymmetricHyperbolicCross };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

struct Cardinality {
    std::uint64_t count = 0;
    bool saturated = false; // true count exceeds the 64-bit range
};

// Implicit description of the search domain. Immutable after construction;
// all boundary decisions are exact (rational products / sums, square-root
// combinations for half-integer p), with a double fast path away from the
// boundary.
class SearchSpace {
  public:
    SearchSpace(SpaceKind kind, int d, Rat extension, std::vector<Rat> gamma,
                std::optional<Rat> p, std::optional<int> superposition_cap, bool is_signed);

    static SearchSpace full_grid(int d, Rat n, Rat gamma = Rat(1),
                                 std::optional<int> cap = {}, bool is_signed = false);
    static SearchSpace hyperbolic_cross(int d, Rat n, Rat gamma = Rat(1),
                                        std::optional<int> cap = {}, bool is_signed = false);
    static SearchSpace lp_ball(int d, Rat p, Rat n, Rat gamma = Rat(1),
                               std::optional<int> cap = {}, bool is_signed = false);
    // budget 2^N per the symmetric-cross definition; N must satisfy 2^N integral
    static SearchSpace symmetric_hyperbolic_cross(int d, Rat N, Rat gamma = Rat(1),
                                                  std::optional<int> cap = {}, bool is_signed = true);

    SpaceKind kind() const { return kind_; }
    int dimension() const { return d_; }
    const Rat& extension() const { return extension_; }
    const std::vector<Rat>& gamma() const { return gamma_; }
    const std::optional<Rat>& p() const { return p_; }
    std::optional<int> superposition_cap() const { return cap_; }
    bool is_signed() const { return signed_; }

    bool contains(const MultiIndex& k) const;

    // largest magnitude admissible in dimension t (1-based) with all other
    // coordinates zero
    Entry max_coordinate(int t) const;

    // membership from coordinate magnitudes (enumeration / counting hot path)
    bool contains_abs(std::span<const Entry> abs_entries, std::size_t nonzeros) const;

  private:
    SpaceKind kind_;
    int d_;
    Rat extension_;
    std::vector<Rat> gamma_;
    std::optional<Rat> p_;
    std::optional<int> cap_;
    bool signed_;

    // precomputed exact/approximate views of the budget
    Rat budget_;                       // n, or 2^N for the symmetric cross
    std::vector<Entry> grid_bound_;    // FullGrid: floor(gamma_j * n)
    double budget_dbl_ = 0.0;
    std::vector<double> inv_gamma_dbl_;
    // LpBall with rational p = a/b (b in {1,2}): exact data
    long long p_num_ = 0, p_den_ = 1;
    Rat budget_pow_;                   // n^a (b==1) exact comparison RHS
    double budget_pow_dbl_ = 0.0;
};

// Membership predicate for P_u(Gamma) plus enumeration when affordable.
// Valid only while the originating SearchSpace is alive.
class ProjectedSpace {
  public:
    ProjectedSpace(const SearchSpace& space, DimSubset u);

    const DimSubset& dims() const { return u_; }
    bool contains(const MultiIndex& k) const;

    // nullopt if the projection has more than `limit` members
    std::optional<IndexSet> enumerate(std::size_t limit) const;

  private:
    const SearchSpace* space_;
    DimSubset u_;
};

ProjectedSpace project(const SearchSpace& space, const DimSubset& u);

// Exact member count; never floating point.
Cardinality cardinality(const SearchSpace& space);

// Full enumeration in lexicographic order; throws EnumerationLimitError above `limit`.
IndexSet enumerate_space(const SearchSpace& space, std::size_t limit);

// Step-2 candidate set: (left x right) filtered by P_{u+v}(Gamma); output on
// the dimension union, lexicographically sorted.
IndexSet candidate_set(const IndexSet& left, const IndexSet& right, const SearchSpace& space);

// interleave two indices living on disjoint dimension subsets
MultiIndex merge_on_union(const DimSubset& u, const MultiIndex& k,
                          const DimSubset& v, const MultiIndex& h);

// flat config block (keys: kind, d, n or N, gamma, p, dtilde, signed)
std::map<std::string, std::string> to_config_block(const SearchSpace& space);
SearchSpace space_from_config_block(const std::map<std::string, std::string>& kv);

} // namespace dimincr
