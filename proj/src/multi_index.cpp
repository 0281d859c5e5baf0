#include "dimincr/multi_index.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dimincr {

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i) os << ',';
        os << entries_[i];
    }
    os << ')';
    return os.str();
}

DimSubset::DimSubset(std::vector<int> dims) : dims_(std::move(dims)) {
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (dims_[i] < 1)
            throw std::invalid_argument("DimSubset: labels are 1-based");
        if (i > 0 && dims_[i] <= dims_[i - 1])
            throw std::invalid_argument("DimSubset: labels must be strictly increasing");
    }
}

DimSubset DimSubset::range(int first, int last) {
    if (first < 1 || last < first - 1)
        throw std::invalid_argument("DimSubset::range: bad bounds");
    std::vector<int> v;
    v.reserve(static_cast<std::size_t>(last - first + 1));
    for (int t = first; t <= last; ++t)
        v.push_back(t);
    return DimSubset(std::move(v));
}

bool DimSubset::contains(int dim) const {
    return std::binary_search(dims_.begin(), dims_.end(), dim);
}

DimSubset DimSubset::complement(int d) const {
    std::vector<int> v;
    v.reserve(static_cast<std::size_t>(d) - dims_.size());
    std::size_t i = 0;
    for (int t = 1; t <= d; ++t) {
        if (i < dims_.size() && dims_[i] == t) {
            ++i;
        } else {
            v.push_back(t);
        }
    }
    if (i != dims_.size())
        throw std::invalid_argument("DimSubset::complement: subset exceeds ambient dimension");
    return DimSubset(std::move(v));
}

bool DimSubset::disjoint_with(const DimSubset& other) const {
    std::size_t i = 0, j = 0;
    while (i < dims_.size() && j < other.dims_.size()) {
        if (dims_[i] == other.dims_[j]) return false;
        if (dims_[i] < other.dims_[j]) ++i; else ++j;
    }
    return true;
}

DimSubset DimSubset::union_of(const DimSubset& a, const DimSubset& b) {
    std::vector<int> v;
    v.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(v));
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return DimSubset(std::move(v));
}

std::string DimSubset::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) os << ',';
        os << dims_[i];
    }
    os << '}';
    return os.str();
}

IndexSet::IndexSet(DimSubset dims, std::vector<MultiIndex> members)
    : dims_(std::move(dims)), members_(std::move(members)) {
    for (const auto& k : members_)
        if (k.size() != dims_.size())
            throw std::invalid_argument("IndexSet: member length does not match dimension subset");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool IndexSet::contains(const MultiIndex& k) const {
    return std::binary_search(members_.begin(), members_.end(), k);
}

IndexSet IndexSet::union_of(const IndexSet& a, const IndexSet& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.dims() != b.dims())
        throw std::invalid_argument("IndexSet::union_of: dimension subsets differ");
    std::vector<MultiIndex> v;
    v.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(v));
    v.erase(std::unique(v.begin(), v.end()), v.end());
    IndexSet out;
    out.dims_ = a.dims();
    out.members_ = std::move(v); // already sorted and unique
    return out;
}

MultiIndex splice(const DimSubset& u, const MultiIndex& k, const DimSubset& uc, const MultiIndex& h) {
    if (u.size() != k.size() || uc.size() != h.size())
        throw std::invalid_argument("splice: index lengths do not match dimension subsets");
    if (!u.disjoint_with(uc))
        throw std::invalid_argument("splice: dimension subsets overlap");
    const int d = static_cast<int>(u.size() + uc.size());
    std::vector<Entry> out(static_cast<std::size_t>(d));
    std::size_t iu = 0, ic = 0;
    for (int t = 1; t <= d; ++t) {
        if (iu < u.size() && u[iu] == t) {
            out[static_cast<std::size_t>(t - 1)] = k[iu++];
        } else if (ic < uc.size() && uc[ic] == t) {
            out[static_cast<std::size_t>(t - 1)] = h[ic++];
        } else {
            throw std::invalid_argument("splice: subsets do not cover {1,...,d}");
        }
    }
    return MultiIndex(std::move(out));
}

MultiIndex restrict_to(const MultiIndex& h, const DimSubset& from, const DimSubset& u) {
    if (h.size() != from.size())
        throw std::invalid_argument("restrict_to: index length does not match source subset");
    std::vector<Entry> out;
    out.reserve(u.size());
    std::size_t j = 0;
    for (int dim : u) {
        while (j < from.size() && from[j] < dim) ++j;
        if (j >= from.size() || from[j] != dim)
            throw std::invalid_argument("restrict_to: target dims not contained in source dims");
        out.push_back(h[j]);
    }
    return MultiIndex(std::move(out));
}

IndexSet project(const IndexSet& s, const DimSubset& u) {
    std::vector<MultiIndex> out;
    out.reserve(s.size());
    for (const auto& h : s)
        out.push_back(restrict_to(h, s.dims(), u));
    return IndexSet(u, std::move(out));
}

} // namespace dimincr
