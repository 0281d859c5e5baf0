#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dimincr {

using Entry = std::int64_t;

// A frequency tuple. Entries are signed; unsigned-domain contexts simply never
// produce negative values. Ordering is lexicographic and total, used for
// deterministic tie-breaking everywhere.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<Entry> entries) : entries_(std::move(entries)) {}
    MultiIndex(std::initializer_list<Entry> entries) : entries_(entries) {}

    static MultiIndex zeros(std::size_t n) { return MultiIndex(std::vector<Entry>(n, 0)); }

    std::size_t size() const { return entries_.size(); }
    Entry operator[](std::size_t i) const { return entries_[i]; }
    Entry& operator[](std::size_t i) { return entries_[i]; }
    std::span<const Entry> entries() const { return entries_; }

    std::size_t nonzero_count() const {
        std::size_t n = 0;
        for (Entry e : entries_)
            if (e != 0) ++n;
        return n;
    }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;
    friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
        return a.entries_ <=> b.entries_;
    }

    std::string to_string() const;

  private:
    std::vector<Entry> entries_;
};

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& k) const {
        std::size_t h = 0x9e3779b97f4a7c15ULL ^ k.size();
        for (Entry e : k) {
            std::size_t x = static_cast<std::size_t>(e);
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

// A set of dimension labels from {1,...,d}, kept strictly increasing.
class DimSubset {
  public:
    DimSubset() = default;
    explicit DimSubset(std::vector<int> dims);

    static DimSubset range(int first, int last); // {first, first+1, ..., last}
    static DimSubset single(int t) { return range(t, t); }

    std::size_t size() const { return dims_.size(); }
    bool empty() const { return dims_.empty(); }
    int operator[](std::size_t i) const { return dims_[i]; }
    std::span<const int> dims() const { return dims_; }
    bool contains(int dim) const;

    DimSubset complement(int d) const; // {1,...,d} \ this
    bool disjoint_with(const DimSubset& other) const;
    static DimSubset union_of(const DimSubset& a, const DimSubset& b);

    auto begin() const { return dims_.begin(); }
    auto end() const { return dims_.end(); }

    friend bool operator==(const DimSubset& a, const DimSubset& b) = default;
    friend std::strong_ordering operator<=>(const DimSubset& a, const DimSubset& b) {
        return a.dims_ <=> b.dims_;
    }

    std::string to_string() const;

  private:
    std::vector<int> dims_;
};

// Finite set of equal-length multi-indices living on a dimension subset.
// Members are stored sorted lexicographically without duplicates.
class IndexSet {
  public:
    IndexSet() = default;
    IndexSet(DimSubset dims, std::vector<MultiIndex> members);

    const DimSubset& dims() const { return dims_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const MultiIndex& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<MultiIndex>& members() const { return members_; }

    bool contains(const MultiIndex& k) const;

    static IndexSet union_of(const IndexSet& a, const IndexSet& b);

    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    friend bool operator==(const IndexSet& a, const IndexSet& b) = default;

  private:
    DimSubset dims_;
    std::vector<MultiIndex> members_;
};

// (k,h)_u: interleave k on dims u with h on the complement; result lives on
// the full range {1,...,|u|+|uc|}.
MultiIndex splice(const DimSubset& u, const MultiIndex& k, const DimSubset& uc, const MultiIndex& h);

// h_u: restriction of an index on `from` to the sub-dimensions `u`.
MultiIndex restrict_to(const MultiIndex& h, const DimSubset& from, const DimSubset& u);

// P_u of an explicit finite set (dims of u must be a subset of s.dims()).
IndexSet project(const IndexSet& s, const DimSubset& u);

} // namespace dimincr
