#include "mmt/microsheaf.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mmt {

namespace {

// all strictly increasing chains within the given strata, sorted by
// (length, lexicographic content)
std::vector<std::vector<int>> enumerate_chains(const FacePoset& poset, const std::vector<int>& strata) {
    std::vector<std::vector<int>> chains;
    std::vector<int> cur;
    auto extend = [&](auto&& self, int last) -> void {
        for (int t : strata) {
            if (t == last || !poset.leq(last, t)) continue;
            cur.push_back(t);
            chains.push_back(cur);
            self(self, t);
            cur.pop_back();
        }
    };
    for (int s : strata) {
        cur = {s};
        chains.push_back(cur);
        extend(extend, s);
    }
    std::sort(chains.begin(), chains.end(), [](const auto& a, const auto& b) {
        return std::pair(a.size(), a) < std::pair(b.size(), b);
    });
    return chains;
}

int find_chain(const std::vector<std::vector<int>>& chains, const std::vector<int>& chain) {
    auto it = std::lower_bound(chains.begin(), chains.end(), chain, [](const auto& a, const auto& b) {
        return std::pair(a.size(), a) < std::pair(b.size(), b);
    });
    if (it != chains.end() && *it == chain) return static_cast<int>(it - chains.begin());
    return -1;
}

} // namespace

PosetModule::PosetModule(PosetPtr poset, std::vector<IntegerComplex> values,
                         std::vector<std::pair<std::pair<int, int>, IntegerMatrix>> cover_maps)
    : poset_(std::move(poset)), values_(std::move(values)), covers_(values_.size()) {
    if (static_cast<int>(values_.size()) != poset_->size())
        throw ValidationError("module needs one complex per stratum");
    for (auto& [st, m] : cover_maps) {
        auto [s, t] = st;
        const auto& cof = poset_->cofacets(s);
        if (std::find(cof.begin(), cof.end(), t) == cof.end())
            throw ValidationError("module map is not along a covering relation");
        ChainMap f{&values_[s], &values_[t], m};
        if (!is_chain_map(f)) throw ValidationError("module structure map is not a chain map");
        covers_[s].push_back({t, std::move(m)});
    }
    for (auto& c : covers_) std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (int s = 0; s < poset_->size(); ++s) {
        if (static_cast<int>(covers_[s].size()) != static_cast<int>(poset_->cofacets(s).size()))
            throw ValidationError("module is missing a structure map");
        // strictness: squares over every codimension-2 relation commute
        for (const auto& [a, f] : covers_[s]) {
            for (const auto& [t, g] : covers_[a]) {
                IntegerMatrix via_a = g * f;
                for (const auto& [b, f2] : covers_[s]) {
                    if (b == a) continue;
                    for (const auto& [t2, g2] : covers_[b]) {
                        if (t2 != t) continue;
                        if (!(g2 * f2 == via_a))
                            throw ValidationError("module is not strict: composites disagree");
                    }
                }
            }
        }
    }
}

const IntegerMatrix& PosetModule::cover_map(int s, int t) const {
    for (const auto& [u, m] : covers_[s])
        if (u == t) return m;
    throw ValidationError("no such covering relation");
}

IntegerMatrix PosetModule::map_for(int s, int t) const {
    if (s == t) return IntegerMatrix::identity(values_[s].size());
    for (const auto& [c, m] : covers_[s])
        if (poset_->leq(c, t)) return map_for(c, t) * m;
    throw ValidationError("map_for called with unrelated strata");
}

PosetModule PosetModule::constant(const PosetPtr& poset) {
    std::vector<IntegerComplex> values(poset->size(),
                                       IntegerComplex({{"z", 0}}, IntegerMatrix(1, 1)));
    std::vector<std::pair<std::pair<int, int>, IntegerMatrix>> maps;
    for (int s = 0; s < poset->size(); ++s)
        for (int t : poset->cofacets(s)) maps.push_back({{s, t}, IntegerMatrix::identity(1)});
    return PosetModule(poset, std::move(values), std::move(maps));
}

PosetModule PosetModule::indicator(const ConstructibleOpen& u) {
    const PosetPtr& poset = u.poset();
    std::vector<IntegerComplex> values;
    for (int s = 0; s < poset->size(); ++s) {
        if (u.contains(s))
            values.push_back(IntegerComplex({{"z", 0}}, IntegerMatrix(1, 1)));
        else
            values.push_back(IntegerComplex());
    }
    std::vector<std::pair<std::pair<int, int>, IntegerMatrix>> maps;
    for (int s = 0; s < poset->size(); ++s)
        for (int t : poset->cofacets(s)) {
            int rows = u.contains(t) ? 1 : 0;
            int cols = u.contains(s) ? 1 : 0;
            IntegerMatrix m(rows, cols);
            if (rows == 1 && cols == 1) m = IntegerMatrix::identity(1);
            maps.push_back({{s, t}, std::move(m)});
        }
    return PosetModule(poset, std::move(values), std::move(maps));
}

PosetModule PosetModule::skyscraper(const PosetPtr& poset, int vertex_stratum) {
    if (poset->complex().dim(vertex_stratum) != 0)
        throw ValidationError("skyscraper wants a vertex stratum");
    std::vector<IntegerComplex> values(poset->size());
    values[vertex_stratum] = IntegerComplex({{"z", 0}}, IntegerMatrix(1, 1));
    std::vector<std::pair<std::pair<int, int>, IntegerMatrix>> maps;
    for (int s = 0; s < poset->size(); ++s)
        for (int t : poset->cofacets(s))
            maps.push_back({{s, t}, IntegerMatrix(0, s == vertex_stratum ? 1 : 0)});
    return PosetModule(poset, std::move(values), std::move(maps));
}

PosetModule PosetModule::local_system(const Manifold1D& m, int64_t monodromy) {
    if (!m.is_circle()) throw ValidationError("local systems with monodromy need a circle");
    const PosetPtr& poset = m.poset();
    std::vector<IntegerComplex> values(poset->size(),
                                       IntegerComplex({{"z", 0}}, IntegerMatrix(1, 1)));
    int first = m.vertex_order().front();
    int wrap_edge = m.edge_between(m.vertex_order().back(), first);
    int first_stratum = poset->complex().vertex_stratum(first);
    std::vector<std::pair<std::pair<int, int>, IntegerMatrix>> maps;
    for (int s = 0; s < poset->size(); ++s)
        for (int t : poset->cofacets(s)) {
            int64_t c = (s == first_stratum && t == wrap_edge) ? monodromy : 1;
            maps.push_back({{s, t}, IntegerMatrix(1, 1, {{0, 0, c}})});
        }
    return PosetModule(poset, std::move(values), std::move(maps));
}

int IndicatorResolution::chain_index(const std::vector<int>& chain) const {
    return find_chain(chains, chain);
}

IndicatorResolution indicator_resolution(const ConstructibleOpen& u) {
    const PosetPtr& poset = u.poset();
    auto chains = enumerate_chains(*poset, u.strata());
    const int n = static_cast<int>(chains.size());
    std::vector<TwGen> gens(n);
    for (int k = 0; k < n; ++k)
        gens[k] = {chains[k].back(), -(static_cast<int>(chains[k].size()) - 1)};
    std::vector<Entry> es;
    for (int k = 0; k < n; ++k) {
        const auto& g = chains[k];
        if (g.size() < 2) continue;
        for (size_t omit = 0; omit < g.size(); ++omit) {
            std::vector<int> face;
            face.reserve(g.size() - 1);
            for (size_t i = 0; i < g.size(); ++i)
                if (i != omit) face.push_back(g[i]);
            int idx = find_chain(chains, face);
            es.push_back({idx, k, omit % 2 == 0 ? 1 : -1});
        }
    }
    TwistedComplex tc(poset, std::move(gens), IntegerMatrix(n, n, std::move(es)));
    return IndicatorResolution{std::move(tc), std::move(chains)};
}

IntegerMatrix canonical_inclusion(const IndicatorResolution& from_u, const IndicatorResolution& to_v) {
    std::vector<Entry> es;
    for (size_t k = 0; k < from_u.chains.size(); ++k) {
        int idx = to_v.chain_index(from_u.chains[k]);
        if (idx < 0) throw ValidationError("canonical_inclusion: U is not contained in V");
        es.push_back({idx, static_cast<int>(k), 1});
    }
    return IntegerMatrix(to_v.complex.size(), from_u.complex.size(), std::move(es));
}

IntegerMatrix augmentation_to_representable(const IndicatorResolution& res_star, int s,
                                            const TwistedComplex& p_s) {
    if (p_s.size() != 1 || p_s.gens()[0].stratum != s)
        throw ValidationError("augmentation target must be the representable of s");
    std::vector<Entry> es;
    for (size_t k = 0; k < res_star.chains.size(); ++k)
        if (res_star.chains[k].size() == 1) es.push_back({0, static_cast<int>(k), 1});
    return IntegerMatrix(1, res_star.complex.size(), std::move(es));
}

CohomologyReport sections(const ConstructibleOpen& u, const TwistedComplex& f) {
    if (u.poset().get() != f.poset().get()) throw ValidationError("sections: poset mismatch");
    auto res = indicator_resolution(u);
    return cohomology(hom_complex(res.complex, f).complex());
}

CohomologyReport stalk(int t, const TwistedComplex& f) {
    return cohomology(evaluate(f, t));
}

Casting::Casting(ConstructibleOpen u_, ConstructibleOpen v_, std::optional<ConormalPoint> target_,
                 std::string assertion_)
    : u(std::move(u_)), v(std::move(v_)), target(target_), assertion(std::move(assertion_)) {
    if (u.poset().get() != v.poset().get()) throw ValidationError("casting: poset mismatch");
    if (!u.subset_of(v)) throw ValidationError("casting needs U contained in V");
}

TwistedComplex casting_cone(const Casting& c) {
    auto res_u = indicator_resolution(c.u);
    auto res_v = indicator_resolution(c.v);
    return mapping_cone(res_u.complex, res_v.complex, canonical_inclusion(res_u, res_v));
}

CohomologyReport microstalk(const Casting& c, const TwistedComplex& f) {
    if (c.u.poset().get() != f.poset().get()) throw ValidationError("microstalk: poset mismatch");
    TwistedComplex cone = gaussian_reduce(casting_cone(c));
    return cohomology(hom_complex(cone, f).complex());
}

TwistedComplex resolve_module(const PosetModule& m) {
    const PosetPtr& poset = m.poset();
    std::vector<int> all(poset->size());
    for (int i = 0; i < poset->size(); ++i) all[i] = i;
    auto chains = enumerate_chains(*poset, all);

    std::vector<int> block(chains.size() + 1, 0);
    int total = 0;
    for (size_t k = 0; k < chains.size(); ++k) {
        block[k] = total;
        total += m.value(chains[k].front()).size();
    }
    block[chains.size()] = total;

    std::vector<TwGen> gens(total);
    for (size_t k = 0; k < chains.size(); ++k) {
        const auto& val = m.value(chains[k].front());
        int deg_shift = static_cast<int>(chains[k].size()) - 1;
        for (int x = 0; x < val.size(); ++x)
            gens[block[k] + x] = {chains[k].back(), val.degree_of(x) - deg_shift};
    }

    std::vector<Entry> es;
    for (size_t k = 0; k < chains.size(); ++k) {
        const auto& g = chains[k];
        const int klen = static_cast<int>(g.size()) - 1; // chain degree
        const auto& val = m.value(g.front());
        if (val.size() == 0) continue;
        // internal differential, sign (-1)^k
        int64_t internal_sign = (klen % 2 == 0) ? 1 : -1;
        for (const Entry& e : val.differential().entries())
            es.push_back({block[k] + e.row, block[k] + e.col, internal_sign * e.val});
        if (klen == 0) continue;
        for (size_t omit = 0; omit <= g.size() - 1; ++omit) {
            std::vector<int> face;
            for (size_t i = 0; i < g.size(); ++i)
                if (i != omit) face.push_back(g[i]);
            int fk = find_chain(chains, face);
            int64_t sign = (omit % 2 == 0) ? 1 : -1;
            if (omit == 0) {
                // structure map into the value at the new first stratum
                IntegerMatrix rho = m.map_for(g[0], g[1]);
                for (const Entry& e : rho.entries())
                    es.push_back({block[fk] + e.row, block[k] + e.col, sign * e.val});
            } else {
                for (int x = 0; x < val.size(); ++x)
                    es.push_back({block[fk] + x, block[k] + x, sign});
            }
        }
    }
    return TwistedComplex(poset, std::move(gens), IntegerMatrix(total, total, std::move(es)));
}

TwistedComplex refinement_pushforward(const RefinementMap& r, const TwistedComplex& a) {
    if (a.poset().get() != r.source.get()) throw ValidationError("pushforward: object not over the source poset");
    std::vector<TwGen> gens = a.gens();
    for (TwGen& g : gens) g.stratum = r.image[g.stratum];
    return TwistedComplex(r.target, std::move(gens), a.diff());
}

TwistedComplex pullback_object(const RefinementMap& r, const TwistedComplex& f) {
    if (f.poset().get() != r.target.get()) throw ValidationError("pullback: object not over the target poset");
    const PosetPtr& fine = r.source;
    std::vector<IntegerComplex> values(fine->size());
    std::vector<std::vector<int>> ids(fine->size());
    for (int s = 0; s < fine->size(); ++s) values[s] = evaluate(f, r.image[s], &ids[s]);
    std::vector<std::pair<std::pair<int, int>, IntegerMatrix>> maps;
    for (int s = 0; s < fine->size(); ++s)
        for (int t : fine->cofacets(s)) {
            std::vector<Entry> es;
            std::map<int, int> pos_t;
            for (size_t p = 0; p < ids[t].size(); ++p) pos_t[ids[t][p]] = static_cast<int>(p);
            for (size_t p = 0; p < ids[s].size(); ++p)
                es.push_back({pos_t.at(ids[s][p]), static_cast<int>(p), 1});
            maps.push_back({{s, t}, IntegerMatrix(values[t].size(), values[s].size(), std::move(es))});
        }
    return resolve_module(PosetModule(fine, std::move(values), std::move(maps)));
}

ComparisonMap comparison_map(const RefinementMap& r, const ConstructibleOpen& u) {
    auto pre = pullback_open(r, u);
    auto res_fine = indicator_resolution(pre);
    auto res_coarse = indicator_resolution(u);
    TwistedComplex pushed = refinement_pushforward(r, res_fine.complex);
    std::vector<Entry> es;
    for (size_t k = 0; k < res_fine.chains.size(); ++k) {
        // monotonicity makes the image weakly increasing; it degenerates
        // exactly when two consecutive images coincide
        std::vector<int> image;
        bool strict = true;
        for (int s : res_fine.chains[k]) {
            int t = r.image[s];
            if (!image.empty() && image.back() == t) strict = false;
            image.push_back(t);
        }
        if (!strict) continue;
        int idx = res_coarse.chain_index(image);
        if (idx < 0) throw ValidationError("comparison map: image chain missing");
        es.push_back({idx, static_cast<int>(k), 1});
    }
    IntegerMatrix map(res_coarse.complex.size(), pushed.size(), std::move(es));
    if (!is_closed_degree0(pushed, res_coarse.complex, map))
        throw ValidationError("comparison map failed to be a chain map");
    return ComparisonMap{std::move(pushed), std::move(res_coarse.complex), std::move(map)};
}

namespace {

struct StrataOrder {
    std::vector<int> order; // strata in manifold order
    std::vector<int> pos;   // stratum -> position

    explicit StrataOrder(const Manifold1D& m) : order(m.strata_in_order()), pos(m.poset()->size(), -1) {
        for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    }
};

ConstructibleOpen positions_open(const Manifold1D& m, const StrataOrder& so,
                                 const std::vector<int>& positions) {
    std::vector<int> strata;
    for (int p : positions) strata.push_back(so.order[p]);
    return ConstructibleOpen(m.poset(), std::move(strata));
}

} // namespace

// The sweep's level crossings sit inside open edges, so the minimal sweep
// across (v, +) gains exactly the strata {v, edge(v, next)}: U is everything
// strictly before v and V everything strictly before next(v) (a ray off the
// path end when there is no next vertex).
Casting minimal_casting(const Manifold1D& m, int vertex, Sign sign) {
    if (!is_conormal_point(m, {vertex, sign}))
        throw ValidationError("no conormal direction there");
    StrataOrder so(m);
    const int total = static_cast<int>(so.order.size());
    auto vpos = [&](int v) { return so.pos[m.complex().vertex_stratum(v)]; };

    auto before = [&](int v) { // strata strictly before vertex v
        std::vector<int> ps;
        for (int p = 0; p < vpos(v); ++p) ps.push_back(p);
        return ps;
    };
    auto after = [&](int v) {
        std::vector<int> ps;
        for (int p = vpos(v) + 1; p < total; ++p) ps.push_back(p);
        return ps;
    };
    auto everything = [&]() {
        std::vector<int> ps(total);
        for (int p = 0; p < total; ++p) ps[p] = p;
        return ps;
    };
    auto arc = [&](int x, int y) { // strata strictly between vertices x and y, forward
        std::vector<int> ps;
        for (int p = (vpos(x) + 1) % total; p != vpos(y); p = (p + 1) % total) ps.push_back(p);
        return ps;
    };

    std::vector<int> u_pos, v_pos;
    if (!m.is_circle()) {
        if (m.vertex_count() < 2) throw ValidationError("casting needs at least one edge");
        auto b = m.next_vertex(vertex);
        auto a = m.prev_vertex(vertex);
        if (sign == Sign::plus) {
            u_pos = before(vertex);
            v_pos = b ? before(*b) : everything();
        } else {
            u_pos = after(vertex);
            v_pos = a ? after(*a) : everything();
        }
    } else {
        if (m.vertex_count() < 3) throw ValidationError("circle casting needs at least 3 vertices");
        int a = *m.prev_vertex(vertex);
        int b = *m.next_vertex(vertex);
        if (sign == Sign::plus) {
            u_pos = arc(a, vertex);
            v_pos = arc(a, b);
        } else {
            u_pos = arc(vertex, b);
            v_pos = arc(a, b);
        }
    }
    return Casting(positions_open(m, so, u_pos), positions_open(m, so, v_pos),
                   ConormalPoint{vertex, sign});
}

std::vector<ConormalPoint> microsupport_1d(const Manifold1D& m, const TwistedComplex& f) {
    if (f.poset().get() != m.poset().get()) throw ValidationError("microsupport: poset mismatch");
    auto sub1 = subdivide_1d(m);
    auto sub2 = subdivide_1d(sub1.refined);
    RefinementMap r = compose(sub1.map, sub2.map);
    TwistedComplex fine = gaussian_reduce(pullback_object(r, f));

    struct Task {
        int coarse_vertex;
        Sign sign;
        int fine_vertex;
    };
    std::vector<Task> tasks;
    for (ConormalPoint p : conormal_points(m)) {
        int fine_v = *sub2.refined.complex().vertex_id(m.complex().vertex_labels()[p.vertex]);
        tasks.push_back({p.vertex, p.sign, fine_v});
    }
    std::vector<char> hit(tasks.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < tasks.size(); ++i) {
        Casting c = minimal_casting(sub2.refined, tasks[i].fine_vertex, tasks[i].sign);
        hit[i] = !microstalk(c, fine).is_zero();
    }
    std::vector<ConormalPoint> out;
    for (size_t i = 0; i < tasks.size(); ++i)
        if (hit[i]) out.push_back({tasks[i].coarse_vertex, tasks[i].sign});
    return out;
}

bool is_locally_constant(const TwistedComplex& f) {
    const FacePoset& poset = *f.poset();
    for (int s = 0; s < poset.size(); ++s) {
        for (int t : poset.cofacets(s)) {
            std::vector<int> ids_s, ids_t;
            IntegerComplex ev_s = evaluate(f, s, &ids_s);
            IntegerComplex ev_t = evaluate(f, t, &ids_t);
            std::map<int, int> pos_t;
            for (size_t p = 0; p < ids_t.size(); ++p) pos_t[ids_t[p]] = static_cast<int>(p);
            std::vector<Entry> es;
            for (size_t p = 0; p < ids_s.size(); ++p)
                es.push_back({pos_t.at(ids_s[p]), static_cast<int>(p), 1});
            ChainMap inc{&ev_s, &ev_t, IntegerMatrix(ev_t.size(), ev_s.size(), std::move(es))};
            if (!is_quasi_iso(inc)) return false;
        }
    }
    return true;
}

} // namespace mmt
