#include "dimincr/search_space.hpp"

#include "dimincr/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dimincr {

namespace {

using BigFloat = boost::multiprecision::cpp_bin_float_100;

BigInt bigpow(BigInt base, unsigned e) {
    BigInt r = 1;
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

std::vector<BigInt>& factorial_table() {
    static std::vector<BigInt> table = {BigInt(1)};
    return table;
}

const BigInt& factorial(std::size_t n) {
    auto& table = factorial_table();
    while (table.size() <= n)
        table.push_back(table.back() * BigInt(table.size()));
    return table[n];
}

Entry floor_rat(const Rat& r) {
    // nonnegative inputs only
    BigInt q = r.num() / r.den();
    return static_cast<Entry>(q.convert_to<long long>());
}

// relative margin of the double fast path; anything closer to the boundary
// goes through exact arithmetic
constexpr double kFastMargin = 1e-9;

} // namespace

std::string to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::FullGrid: return "full-grid";
        case SpaceKind::HyperbolicCross: return "hyperbolic-cross";
        case SpaceKind::LpBall: return "lp-ball";
        case SpaceKind::SymmetricHyperbolicCross: return "symmetric-hyperbolic-cross";
    }
    return "?";
}

SpaceKind space_kind_from_string(const std::string& name) {
    if (name == "full-grid" || name == "grid") return SpaceKind::FullGrid;
    if (name == "hyperbolic-cross") return SpaceKind::HyperbolicCross;
    if (name == "lp-ball") return SpaceKind::LpBall;
    if (name == "symmetric-hyperbolic-cross" || name == "sym-hyperbolic-cross")
        return SpaceKind::SymmetricHyperbolicCross;
    throw ConfigError("unknown search-space kind '" + name + "'");
}

SearchSpace::SearchSpace(SpaceKind kind, int d, Rat extension, std::vector<Rat> gamma,
                         std::optional<Rat> p, std::optional<int> superposition_cap, bool is_signed)
    : kind_(kind), d_(d), extension_(std::move(extension)), gamma_(std::move(gamma)),
      p_(std::move(p)), cap_(superposition_cap), signed_(is_signed) {
    if (d_ < 1) throw ConfigError("search space: dimension must be >= 1");
    if (gamma_.empty()) gamma_.assign(static_cast<std::size_t>(d_), Rat(1));
    if (gamma_.size() == 1 && d_ > 1) gamma_.assign(static_cast<std::size_t>(d_), gamma_[0]);
    if (gamma_.size() != static_cast<std::size_t>(d_))
        throw ConfigError("search space: gamma must be scalar or one weight per dimension");
    for (const auto& g : gamma_)
        if (g.sign() <= 0) throw ConfigError("search space: gamma weights must be positive");
    if (cap_ && *cap_ < 0) throw ConfigError("search space: superposition cap must be >= 0");
    if (extension_.sign() <= 0) throw ConfigError("search space: extension must be positive");

    if (kind_ == SpaceKind::SymmetricHyperbolicCross) {
        // budget is 2^N with 2^N integral
        const Rat& N = extension_;
        if (N.is_integer()) {
            long long e = N.num().convert_to<long long>();
            if (e < 0 || e > 62) throw ConfigError("symmetric cross: N out of range");
            budget_ = Rat(1LL << e);
        } else {
            double b = std::pow(2.0, N.to_double());
            double r = std::round(b);
            if (!(std::abs(b - r) < 1e-9 * std::max(1.0, r)))
                throw ConfigError("symmetric cross: 2^N must be an integer");
            budget_ = Rat(static_cast<long long>(r));
        }
    } else {
        budget_ = extension_;
    }

    if (kind_ == SpaceKind::LpBall) {
        if (!p_) throw ConfigError("lp-ball: missing exponent p");
        if (p_->sign() <= 0) throw ConfigError("lp-ball: p must be positive");
        p_num_ = p_->num().convert_to<long long>();
        p_den_ = p_->den().convert_to<long long>();
        if (p_den_ == 1)
            budget_pow_ = budget_.pow(static_cast<unsigned>(p_num_));
        budget_pow_dbl_ = std::pow(budget_.to_double(), p_->to_double());
    }

    if (kind_ == SpaceKind::FullGrid) {
        grid_bound_.reserve(static_cast<std::size_t>(d_));
        for (const auto& g : gamma_)
            grid_bound_.push_back(floor_rat(g * budget_));
    }

    budget_dbl_ = budget_.to_double();
    inv_gamma_dbl_.reserve(gamma_.size());
    for (const auto& g : gamma_)
        inv_gamma_dbl_.push_back(1.0 / g.to_double());
}

SearchSpace SearchSpace::full_grid(int d, Rat n, Rat gamma, std::optional<int> cap, bool is_signed) {
    return SearchSpace(SpaceKind::FullGrid, d, std::move(n), {std::move(gamma)}, {}, cap, is_signed);
}

SearchSpace SearchSpace::hyperbolic_cross(int d, Rat n, Rat gamma, std::optional<int> cap, bool is_signed) {
    return SearchSpace(SpaceKind::HyperbolicCross, d, std::move(n), {std::move(gamma)}, {}, cap, is_signed);
}

SearchSpace SearchSpace::lp_ball(int d, Rat p, Rat n, Rat gamma, std::optional<int> cap, bool is_signed) {
    return SearchSpace(SpaceKind::LpBall, d, std::move(n), {std::move(gamma)}, std::move(p), cap, is_signed);
}

SearchSpace SearchSpace::symmetric_hyperbolic_cross(int d, Rat N, Rat gamma, std::optional<int> cap,
                                                    bool is_signed) {
    return SearchSpace(SpaceKind::SymmetricHyperbolicCross, d, std::move(N), {std::move(gamma)}, {},
                       cap, is_signed);
}

bool SearchSpace::contains(const MultiIndex& k) const {
    if (k.size() != static_cast<std::size_t>(d_))
        throw std::invalid_argument("SearchSpace::contains: index length != dimension");
    std::vector<Entry> abs(k.size());
    std::size_t nnz = 0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        Entry e = k[j];
        if (e < 0) {
            if (!signed_) return false;
            e = -e;
        }
        abs[j] = e;
        if (e != 0) ++nnz;
    }
    return contains_abs(abs, nnz);
}

bool SearchSpace::contains_abs(std::span<const Entry> a, std::size_t nonzeros) const {
    if (cap_ && nonzeros > static_cast<std::size_t>(*cap_)) return false;

    switch (kind_) {
        case SpaceKind::FullGrid: {
            for (std::size_t j = 0; j < a.size(); ++j)
                if (a[j] > grid_bound_[j]) return false;
            return true;
        }
        case SpaceKind::HyperbolicCross:
        case SpaceKind::SymmetricHyperbolicCross: {
            double prod = 1.0;
            for (std::size_t j = 0; j < a.size(); ++j) {
                const double t = static_cast<double>(a[j]) * inv_gamma_dbl_[j];
                if (t > 1.0) prod *= t;
            }
            if (prod < budget_dbl_ * (1.0 - kFastMargin)) return true;
            if (prod > budget_dbl_ * (1.0 + kFastMargin)) return false;
            Rat exact(1);
            for (std::size_t j = 0; j < a.size(); ++j) {
                Rat t = Rat(a[j]) / gamma_[j];
                if (t > Rat(1)) exact = exact * t;
            }
            return exact <= budget_;
        }
        case SpaceKind::LpBall: {
            const double p_dbl = p_->to_double();
            double sum = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) {
                if (a[j] == 0) continue;
                sum += std::pow(static_cast<double>(a[j]) * inv_gamma_dbl_[j], p_dbl);
            }
            if (sum < budget_pow_dbl_ * (1.0 - kFastMargin)) return true;
            if (sum > budget_pow_dbl_ * (1.0 + kFastMargin)) return false;

            if (p_den_ == 1) {
                Rat exact(0);
                for (std::size_t j = 0; j < a.size(); ++j) {
                    if (a[j] == 0) continue;
                    exact = exact + (Rat(a[j]) / gamma_[j]).pow(static_cast<unsigned>(p_num_));
                }
                return exact <= budget_pow_;
            }
            if (p_den_ == 2) {
                // each term (P/Q)^(a/2) = sqrt(P^a Q^a) / Q^a; compare the
                // integer-coefficient square-root combination against n^(a/2)
                const auto e = static_cast<unsigned>(p_num_);
                BigInt lcm_den = 1;
                std::vector<std::pair<BigInt, BigInt>> parts; // (Q^a, P^a Q^a)
                for (std::size_t j = 0; j < a.size(); ++j) {
                    if (a[j] == 0) continue;
                    Rat r = Rat(a[j]) / gamma_[j];
                    BigInt Pa = bigpow(r.num(), e), Qa = bigpow(r.den(), e);
                    lcm_den = boost::multiprecision::lcm(lcm_den, Qa);
                    parts.emplace_back(Qa, Pa * Qa);
                }
                BigInt Qn = bigpow(budget_.den(), e);
                BigInt Pn = bigpow(budget_.num(), e);
                lcm_den = boost::multiprecision::lcm(lcm_den, Qn);
                std::vector<std::pair<BigInt, BigInt>> terms;
                terms.reserve(parts.size() + 1);
                for (auto& [Qa, rad] : parts)
                    terms.emplace_back(lcm_den / Qa, rad);
                terms.emplace_back(-(lcm_den / Qn), Pn * Qn);
                return sqrt_combination_sign(std::move(terms)) <= 0;
            }
            // general exponent: high-precision comparison (exact ties are not
            // expected from integer index data at irrational powers)
            BigFloat lhs = 0;
            BigFloat pp = BigFloat(p_->num()) / BigFloat(p_->den());
            for (std::size_t j = 0; j < a.size(); ++j) {
                if (a[j] == 0) continue;
                BigFloat base = BigFloat(a[j]) * BigFloat(gamma_[j].den()) / BigFloat(gamma_[j].num());
                lhs += pow(base, pp);
            }
            BigFloat rhs = pow(BigFloat(budget_.num()) / BigFloat(budget_.den()), pp);
            return lhs <= rhs * (1 + BigFloat("1e-60"));
        }
    }
    return false;
}

Entry SearchSpace::max_coordinate(int t) const {
    if (t < 1 || t > d_)
        throw std::invalid_argument("SearchSpace::max_coordinate: dimension out of range");
    std::vector<Entry> probe(static_cast<std::size_t>(d_), 0);
    auto feasible = [&](Entry v) {
        probe[static_cast<std::size_t>(t - 1)] = v;
        return contains_abs(probe, v != 0 ? 1 : 0);
    };
    if (!feasible(0)) return -1;
    Entry hi = 1;
    while (feasible(hi)) {
        if (hi > (Entry(1) << 40))
            throw std::runtime_error("SearchSpace::max_coordinate: unbounded coordinate");
        hi <<= 1;
    }
    Entry lo = hi >> 1; // feasible
    while (lo + 1 < hi) {
        Entry mid = lo + (hi - lo) / 2;
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// projection

ProjectedSpace::ProjectedSpace(const SearchSpace& space, DimSubset u) : space_(&space), u_(std::move(u)) {
    if (u_.empty())
        throw std::invalid_argument("project: empty dimension subset");
    if (u_.dims().back() > space.dimension())
        throw std::invalid_argument("project: subset exceeds space dimension");
}

bool ProjectedSpace::contains(const MultiIndex& k) const {
    if (k.size() != u_.size())
        throw std::invalid_argument("ProjectedSpace::contains: index length != |u|");
    // all constraints are monotone in coordinate magnitudes, so an index is
    // extendable into the space iff its zero-extension is a member
    std::vector<Entry> abs(static_cast<std::size_t>(space_->dimension()), 0);
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < u_.size(); ++i) {
        Entry e = k[i];
        if (e < 0) {
            if (!space_->is_signed()) return false;
            e = -e;
        }
        abs[static_cast<std::size_t>(u_[i] - 1)] = e;
        if (e != 0) ++nnz;
    }
    return space_->contains_abs(abs, nnz);
}

namespace {

// shared enumeration core: free coordinates on `dims`, zeros elsewhere;
// returns false as soon as `limit` would be exceeded
bool enumerate_over(const SearchSpace& space, const DimSubset& dims, std::size_t limit,
                    std::vector<MultiIndex>& out) {
    std::vector<Entry> full(static_cast<std::size_t>(space.dimension()), 0);
    std::vector<Entry> abs(full.size(), 0);
    std::vector<Entry> current(dims.size(), 0);
    std::size_t nnz = 0;

    // feasibility of the current prefix padded with zeros; monotone in each
    // magnitude, so scanning v upward finds the exact per-prefix bound
    std::function<bool(std::size_t)> rec = [&](std::size_t pos) -> bool {
        if (pos == dims.size()) {
            if (out.size() >= limit) return false;
            std::vector<Entry> entries(current.begin(), current.end());
            out.emplace_back(std::move(entries));
            return true;
        }
        const std::size_t slot = static_cast<std::size_t>(dims[pos] - 1);
        Entry vmax = -1;
        for (Entry v = 0;; ++v) {
            abs[slot] = v;
            if (!space.contains_abs(abs, nnz + (v != 0 ? 1 : 0))) break;
            vmax = v;
        }
        abs[slot] = 0;
        if (vmax < 0) return true; // nothing feasible under this prefix
        const Entry vmin = space.is_signed() ? -vmax : 0;
        for (Entry v = vmin; v <= vmax; ++v) {
            current[pos] = v;
            abs[slot] = v < 0 ? -v : v;
            nnz += (v != 0);
            bool ok = rec(pos + 1);
            nnz -= (v != 0);
            abs[slot] = 0;
            current[pos] = 0;
            if (!ok) return false;
        }
        return true;
    };
    return rec(0);
}

} // namespace

std::optional<IndexSet> ProjectedSpace::enumerate(std::size_t limit) const {
    std::vector<MultiIndex> out;
    if (!enumerate_over(*space_, u_, limit, out))
        return std::nullopt;
    return IndexSet(u_, std::move(out));
}

ProjectedSpace project(const SearchSpace& space, const DimSubset& u) {
    return ProjectedSpace(space, u);
}

IndexSet enumerate_space(const SearchSpace& space, std::size_t limit) {
    std::vector<MultiIndex> out;
    if (!enumerate_over(space, DimSubset::range(1, space.dimension()), limit, out))
        throw EnumerationLimitError("enumerate_space: more than " + std::to_string(limit) + " members");
    return IndexSet(DimSubset::range(1, space.dimension()), std::move(out));
}

// ---------------------------------------------------------------------------
// cardinality

namespace {

BigInt permutation_count(const std::vector<Entry>& profile, int d, bool is_signed) {
    // distinct placements of a non-increasing magnitude profile into d slots
    const std::size_t z = profile.size();
    BigInt count = factorial(static_cast<std::size_t>(d));
    count /= factorial(static_cast<std::size_t>(d) - z);
    std::size_t run = 1;
    for (std::size_t i = 1; i <= z; ++i) {
        if (i < z && profile[i] == profile[i - 1]) {
            ++run;
        } else {
            count /= factorial(run);
            run = 1;
        }
    }
    if (is_signed)
        count <<= z;
    return count;
}

BigInt count_uniform(const SearchSpace& space) {
    const int d = space.dimension();
    const std::size_t maxlen = std::min<std::size_t>(
        static_cast<std::size_t>(d),
        space.superposition_cap() ? static_cast<std::size_t>(*space.superposition_cap())
                                  : static_cast<std::size_t>(d));
    std::vector<Entry> abs(static_cast<std::size_t>(d), 0);
    auto feasible = [&](const std::vector<Entry>& prof) {
        for (std::size_t i = 0; i < prof.size(); ++i)
            abs[i] = prof[i];
        bool ok = space.contains_abs(abs, prof.size());
        for (std::size_t i = 0; i < prof.size(); ++i)
            abs[i] = 0;
        return ok;
    };

    MultiIndex zero = MultiIndex::zeros(static_cast<std::size_t>(d));
    BigInt total = space.contains(zero) ? 1 : 0;
    if (maxlen == 0) return total;

    std::vector<Entry> prof;
    std::function<void(Entry)> rec = [&](Entry vcap) {
        for (Entry v = vcap; v >= 1; --v) {
            prof.push_back(v);
            if (feasible(prof)) {
                total += permutation_count(prof, d, space.is_signed());
                if (prof.size() < maxlen)
                    rec(v);
            }
            prof.pop_back();
        }
    };
    Entry vmax = space.max_coordinate(1);
    if (vmax >= 1)
        rec(vmax);
    return total;
}

BigInt count_generic(const SearchSpace& space) {
    // per-member recursion; exact but linear in the member count
    const int d = space.dimension();
    std::vector<Entry> abs(static_cast<std::size_t>(d), 0);
    std::size_t nnz = 0;
    BigInt total = 0;
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
        if (j == static_cast<std::size_t>(d)) {
            ++total;
            return;
        }
        rec(j + 1); // value 0
        for (Entry v = 1;; ++v) {
            abs[j] = v;
            ++nnz;
            if (!space.contains_abs(abs, nnz)) {
                --nnz;
                abs[j] = 0;
                break;
            }
            BigInt before = total;
            rec(j + 1);
            if (space.is_signed())
                total += total - before; // mirror branch for -v
            --nnz;
            abs[j] = 0;
        }
    };
    if (space.contains_abs(abs, 0))
        rec(0);
    // the recursion above counts every member exactly once: value 0 first,
    // then each positive magnitude with its sign mirror
    return total;
}

} // namespace

Cardinality cardinality(const SearchSpace& space) {
    BigInt total;
    if (space.kind() == SpaceKind::FullGrid) {
        // nonzero-count DP handles the superposition cap exactly
        const int d = space.dimension();
        const std::size_t cap = space.superposition_cap()
                                    ? static_cast<std::size_t>(*space.superposition_cap())
                                    : static_cast<std::size_t>(d);
        std::vector<BigInt> ways(std::min(cap, static_cast<std::size_t>(d)) + 1, BigInt(0));
        ways[0] = 1;
        for (int j = 1; j <= d; ++j) {
            BigInt choices = space.max_coordinate(j);
            if (choices < 0) { ways.assign(ways.size(), BigInt(0)); break; }
            if (space.is_signed()) choices *= 2;
            for (std::size_t c = ways.size(); c-- > 1;)
                ways[c] = ways[c] + ways[c - 1] * choices;
        }
        for (const auto& w : ways)
            total += w;
    } else {
        bool uniform = true;
        for (const auto& g : space.gamma())
            if (!(g == space.gamma().front())) { uniform = false; break; }
        total = uniform ? count_uniform(space) : count_generic(space);
    }

    Cardinality result;
    if (total > BigInt(std::numeric_limits<std::uint64_t>::max())) {
        result.count = std::numeric_limits<std::uint64_t>::max();
        result.saturated = true;
    } else {
        result.count = total.convert_to<std::uint64_t>();
    }
    return result;
}

// ---------------------------------------------------------------------------
// candidate sets

MultiIndex merge_on_union(const DimSubset& u, const MultiIndex& k,
                          const DimSubset& v, const MultiIndex& h) {
    if (u.size() != k.size() || v.size() != h.size())
        throw std::invalid_argument("merge_on_union: index lengths do not match subsets");
    if (!u.disjoint_with(v))
        throw std::invalid_argument("merge_on_union: subsets overlap");
    std::vector<Entry> out(u.size() + v.size());
    std::size_t iu = 0, iv = 0, o = 0;
    while (iu < u.size() || iv < v.size()) {
        if (iv >= v.size() || (iu < u.size() && u[iu] < v[iv]))
            out[o++] = k[iu++];
        else
            out[o++] = h[iv++];
    }
    return MultiIndex(std::move(out));
}

IndexSet candidate_set(const IndexSet& left, const IndexSet& right, const SearchSpace& space) {
    if (left.empty() || right.empty())
        throw std::invalid_argument("candidate_set: inputs must be nonempty");
    const DimSubset w = DimSubset::union_of(left.dims(), right.dims());
    if (!left.dims().disjoint_with(right.dims()))
        throw std::invalid_argument("candidate_set: dimension subsets overlap");
    ProjectedSpace pw = project(space, w);
    std::vector<MultiIndex> out;
    out.reserve(left.size() * right.size());
    for (const auto& k : left)
        for (const auto& h : right) {
            MultiIndex merged = merge_on_union(left.dims(), k, right.dims(), h);
            if (pw.contains(merged))
                out.push_back(std::move(merged));
        }
    return IndexSet(w, std::move(out));
}

// ---------------------------------------------------------------------------
// config block

std::map<std::string, std::string> to_config_block(const SearchSpace& space) {
    std::map<std::string, std::string> kv;
    kv["kind"] = to_string(space.kind());
    kv["d"] = std::to_string(space.dimension());
    kv[space.kind() == SpaceKind::SymmetricHyperbolicCross ? "N" : "n"] =
        space.extension().to_string();
    bool uniform = true;
    for (const auto& g : space.gamma())
        if (!(g == space.gamma().front())) { uniform = false; break; }
    if (uniform) {
        kv["gamma"] = space.gamma().front().to_string();
    } else {
        std::string s;
        for (const auto& g : space.gamma()) {
            if (!s.empty()) s += ' ';
            s += g.to_string();
        }
        kv["gamma"] = s;
    }
    if (space.kind() == SpaceKind::LpBall)
        kv["p"] = space.p()->to_string();
    if (space.superposition_cap())
        kv["dtilde"] = std::to_string(*space.superposition_cap());
    kv["signed"] = space.is_signed() ? "true" : "false";
    return kv;
}

SearchSpace space_from_config_block(const std::map<std::string, std::string>& kv) {
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("space block: missing key '" + key + "'");
        return it->second;
    };
    SpaceKind kind = space_kind_from_string(need("kind"));
    int d = std::stoi(need("d"));
    Rat ext = Rat::from_string(kv.count("N") ? kv.at("N") : need("n"));

    std::vector<Rat> gamma;
    if (auto it = kv.find("gamma"); it != kv.end()) {
        std::string s = it->second;
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t sp = s.find(' ', pos);
            if (sp == std::string::npos) sp = s.size();
            if (sp > pos) gamma.push_back(Rat::from_string(s.substr(pos, sp - pos)));
            pos = sp + 1;
        }
    }
    std::optional<Rat> p;
    if (auto it = kv.find("p"); it != kv.end() && it->second != "inf")
        p = Rat::from_string(it->second);
    if (kind == SpaceKind::LpBall && !p) {
        if (kv.count("p"))
            kind = SpaceKind::FullGrid; // p = inf is the (weighted) full grid
        else
            throw ConfigError("space block: lp-ball requires p");
    }
    std::optional<int> cap;
    if (auto it = kv.find("dtilde"); it != kv.end())
        cap = std::stoi(it->second);
    bool is_signed = false;
    if (auto it = kv.find("signed"); it != kv.end())
        is_signed = (it->second == "true" || it->second == "1" || it->second == "yes");

    return SearchSpace(kind, d, std::move(ext), std::move(gamma), std::move(p), cap, is_signed);
}

} // namespace dimincr
