#include "mmt/theatre.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

namespace mmt {

bool StopSpec1D::contains(ConormalPoint p) const {
    return std::binary_search(points.begin(), points.end(), p);
}

StopSpec1D make_stop_spec(const Manifold1D& m, std::vector<ConormalPoint> points) {
    for (const ConormalPoint& p : points)
        if (!is_conormal_point(m, p))
            throw ValidationError("stop point is not a conormal direction of this manifold");
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return StopSpec1D{std::move(points)};
}

MorseCharacter morse_character(const Casting& c) {
    TwistedComplex cone = casting_cone(c);
    TwistedComplex model = gaussian_reduce(cone);
    return MorseCharacter{c, std::move(cone), std::move(model)};
}

// The geometric sweep has its two level crossings inside open edges, so the
// swept strata V minus U read off the crossed vertices exactly: for a
// rightward sweep the difference starts at the first crossed vertex and
// ends with the edge carrying the upper crossing (or runs off a path end).
bool validate_casting_1d(const Manifold1D& m, const Casting& c, const StopSpec1D& lambda) {
    if (c.u.poset().get() != m.poset().get()) throw ValidationError("casting over a different poset");
    if (!c.target) return false;
    if (!is_conormal_point(m, *c.target)) return false;
    const Sign sign = c.target->sign;

    std::vector<int> diff;
    std::set_difference(c.v.strata().begin(), c.v.strata().end(), c.u.strata().begin(),
                        c.u.strata().end(), std::back_inserter(diff));
    if (diff.empty()) return false;

    std::vector<int> order = m.strata_in_order();
    const int total = static_cast<int>(order.size());
    std::vector<int> pos(m.poset()->size(), -1);
    for (int i = 0; i < total; ++i) pos[order[i]] = i;
    std::vector<char> in_diff(total, 0);
    for (int s : diff) in_diff[pos[s]] = 1;
    const int len = static_cast<int>(diff.size());

    // the swept strata must form one contiguous run
    int start = -1;
    if (m.is_circle()) {
        if (len == total) return false;
        for (int p = 0; p < total; ++p)
            if (in_diff[p] && !in_diff[(p + total - 1) % total]) {
                if (start >= 0) return false; // two runs
                start = p;
            }
        for (int i = 0; i < len; ++i)
            if (!in_diff[(start + i) % total]) return false;
    } else {
        for (int p = 0; p < total; ++p)
            if (in_diff[p]) {
                start = p;
                break;
            }
        for (int i = 0; i < len; ++i)
            if (start + i >= total || !in_diff[start + i]) return false;
    }

    auto at = [&](int i) { return order[((start + i) % total + total) % total]; };
    const auto& k = m.complex();
    const int entry_off = (sign == Sign::plus) ? 0 : len - 1;
    const int exit_off = (sign == Sign::plus) ? len - 1 : 0;

    // entry side: the first crossed vertex, with U (the lower sublevel)
    // supplying everything behind it; at a path end U is empty behind it
    if (k.dim(at(entry_off)) != 0) return false;
    if (m.is_circle()) {
        int behind = (sign == Sign::plus) ? entry_off - 1 : entry_off + 1;
        if (!c.u.contains(at(behind))) return false;
    } else {
        int behind_abs = (sign == Sign::plus) ? start + entry_off - 1 : start + entry_off + 1;
        if (behind_abs >= 0 && behind_abs < total && !c.u.contains(order[behind_abs])) return false;
    }

    // exit side: the edge holding the upper level crossing, or a ray off a
    // path end (then the last stratum is the end vertex, which is swept)
    if (k.dim(at(exit_off)) != 1) {
        if (m.is_circle()) return false;
        int abs_exit = start + exit_off;
        bool at_boundary = (sign == Sign::plus) ? (abs_exit == total - 1) : (abs_exit == 0);
        if (!at_boundary) return false;
    }

    // the target is one of the swept vertices
    int vstrat = k.vertex_stratum(c.target->vertex);
    if (pos[vstrat] < 0 || !in_diff[pos[vstrat]]) return false;

    // every other swept vertex must avoid the kept stop in this direction
    for (int i = 0; i < len; ++i) {
        int s = at(i);
        if (k.dim(s) != 0 || s == vstrat) continue;
        if (lambda.contains({k.stratum(s)[0], sign})) return false;
    }
    return true;
}

QuotientContext::QuotientContext(PosetPtr poset, std::vector<MorseCharacter> characters,
                                 std::optional<Manifold1D> manifold, StopSpec1D lambda,
                                 ResourceLimits limits)
    : poset_(std::move(poset)), characters_(std::move(characters)), manifold_(std::move(manifold)),
      lambda_(std::move(lambda)), limits_(limits) {
    for (const MorseCharacter& x : characters_)
        if (x.cone.poset().get() != poset_.get())
            throw ValidationError("character over a different poset");
    const int m = static_cast<int>(characters_.size());
    hom_cache_.resize(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            hom_cache_[static_cast<size_t>(i) * m + j] =
                hom_complex(characters_[i].model, characters_[j].model);
}

const HomComplexWithBasis& QuotientContext::hom_xx(int i, int j) const {
    return hom_cache_[static_cast<size_t>(i) * characters_.size() + j];
}

QuotientContext auto_cast_1d(const Manifold1D& k, const StopSpec1D& lambda, ResourceLimits limits) {
    for (const ConormalPoint& p : lambda.points)
        if (p.vertex < 0 || p.vertex >= k.complex().vertex_count())
            throw ValidationError("stop point references a missing vertex");
    auto sub1 = subdivide_1d(k);
    auto sub2 = subdivide_1d(sub1.refined);
    const Manifold1D& fine = sub2.refined;

    std::vector<ConormalPoint> carried;
    for (const ConormalPoint& p : lambda.points) {
        auto id = fine.complex().vertex_id(k.complex().vertex_labels()[p.vertex]);
        carried.push_back({*id, p.sign});
    }
    StopSpec1D fine_lambda = make_stop_spec(fine, std::move(carried));

    std::vector<MorseCharacter> characters;
    for (ConormalPoint p : conormal_points(fine)) {
        if (fine_lambda.contains(p)) continue;
        Casting c = minimal_casting(fine, p.vertex, p.sign);
        if (!validate_casting_1d(fine, c, fine_lambda))
            throw ValidationError("auto-cast produced an invalid casting");
        characters.push_back(morse_character(c));
    }
    return QuotientContext(fine.poset(), std::move(characters), fine, std::move(fine_lambda), limits);
}

int BarComplex::word_index(const std::vector<int>& letters) const {
    auto it = word_of_.find(letters);
    return it == word_of_.end() ? -1 : it->second;
}

int BarComplex::gen_index(int word, const std::vector<int>& tuple) const {
    const Word& w = words_[word];
    int idx = w.offset;
    for (size_t j = 0; j < tuple.size(); ++j) idx += tuple[j] * w.strides[j];
    return idx;
}

std::vector<int> BarComplex::indices_in_degree(int degree) const {
    std::vector<int> out;
    for (int i = 0; i < complex_.size(); ++i)
        if (complex_.degree_of(i) == degree) out.push_back(i);
    return out;
}

std::vector<int64_t> BarComplex::length_zero_vector(const IntegerMatrix& f) const {
    std::vector<int64_t> out(complex_.size(), 0);
    const Word& w0 = words_.front();
    std::vector<int64_t> v = to_hom_vector(*w0.factors[0], f);
    for (size_t t = 0; t < v.size(); ++t) out[w0.offset + t] = v[t];
    return out;
}

BarComplex build_bar(const QuotientContext& ctx, const TwistedComplex& a, const TwistedComplex& b,
                     int level) {
    if (level < 0) throw ValidationError("bar level must be non-negative");
    if (a.poset().get() != ctx.poset().get() || b.poset().get() != ctx.poset().get())
        throw ValidationError("bar objects must live over the context poset");
    const int m = static_cast<int>(ctx.characters().size());

    BarComplex bar;
    bar.level_ = level;
    auto hab = std::make_unique<HomComplexWithBasis>(hom_complex(a, b));
    std::vector<HomComplexWithBasis*> ha(m), hb(m);
    for (int i = 0; i < m; ++i) {
        bar.owned_.push_back(std::make_unique<HomComplexWithBasis>(hom_complex(a, ctx.characters()[i].model)));
        ha[i] = bar.owned_.back().get();
    }
    for (int i = 0; i < m; ++i) {
        bar.owned_.push_back(std::make_unique<HomComplexWithBasis>(hom_complex(ctx.characters()[i].model, b)));
        hb[i] = bar.owned_.back().get();
    }
    HomComplexWithBasis* hab_ptr = hab.get();
    bar.owned_.push_back(std::move(hab));

    // enumerate words: empty word, then letters in lexicographic order per length
    int64_t total = 0;
    for (int k = 0; k <= level; ++k) {
        if (k > 0 && m == 0) break;
        std::vector<int> letters(k, 0);
        for (;;) {
            BarComplex::Word w;
            w.letters = letters;
            if (k == 0) {
                w.factors = {hab_ptr};
            } else {
                w.factors.resize(k + 1);
                w.factors[0] = ha[letters[0]];
                for (int j = 1; j < k; ++j) w.factors[j] = &ctx.hom_xx(letters[j - 1], letters[j]);
                w.factors[k] = hb[letters[k - 1]];
            }
            w.strides.resize(w.factors.size());
            int block = 1;
            for (size_t j = 0; j < w.factors.size(); ++j) {
                w.strides[j] = block;
                block *= w.factors[j]->size();
            }
            w.block = block;
            w.offset = static_cast<int>(total);
            total += block;
            if (total > ctx.limits().bar_generators)
                throw ResourceError("bar complex exceeds the generator ceiling (" +
                                    std::to_string(ctx.limits().bar_generators) + ")");
            bar.words_.push_back(std::move(w));
            // next letters
            if (k == 0) break;
            int j = k - 1;
            while (j >= 0 && letters[j] == m - 1) letters[j--] = 0;
            if (j < 0) break;
            ++letters[j];
        }
    }

    for (size_t w = 0; w < bar.words_.size(); ++w) bar.word_of_[bar.words_[w].letters] = static_cast<int>(w);
    const auto& word_of = bar.word_of_;

    std::vector<Generator> gens(total);
    std::vector<std::vector<Entry>> per_word(bar.words_.size());

#pragma omp parallel for schedule(dynamic)
    for (size_t wi = 0; wi < bar.words_.size(); ++wi) {
        const BarComplex::Word& w = bar.words_[wi];
        if (w.block == 0) continue;
        const int k = static_cast<int>(w.letters.size());
        const int nf = k + 1;
        std::vector<int> tuple(nf, 0);
        std::vector<Entry>& out = per_word[wi];
        for (int g = 0; g < w.block; ++g) {
            // decode
            int rest = g;
            for (int j = 0; j < nf; ++j) {
                tuple[j] = rest % w.factors[j]->size();
                rest /= w.factors[j]->size();
            }
            int deg = -k;
            for (int j = 0; j < nf; ++j) deg += w.factors[j]->complex().degree_of(tuple[j]);
            gens[w.offset + g] = {"", deg};

            // suffix degree parities
            std::vector<int> suffix(nf + 1, 0);
            for (int j = nf - 1; j >= 0; --j)
                suffix[j] = suffix[j + 1] + w.factors[j]->complex().degree_of(tuple[j]);

            // internal differentials
            for (int j = 0; j < nf; ++j) {
                int64_t sgn = ((suffix[j + 1] + (k - j)) % 2 == 0) ? 1 : -1;
                for (const Entry& e : w.factors[j]->complex().differential().entries()) {
                    if (e.col != tuple[j]) continue;
                    int tgt = w.offset + g + (e.row - tuple[j]) * w.strides[j];
                    out.push_back({tgt, w.offset + g, sgn * e.val});
                }
            }

            // compositions of adjacent factors
            for (int j = 0; j + 1 < nf; ++j) {
                auto [p0, q0] = w.factors[j]->basis()[tuple[j]];
                auto [p1, q1] = w.factors[j + 1]->basis()[tuple[j + 1]];
                if (q0 != p1) continue;
                std::vector<int> sub_letters = w.letters;
                sub_letters.erase(sub_letters.begin() + j);
                int swi = word_of.at(sub_letters);
                const BarComplex::Word& sw = bar.words_[swi];
                int merged = sw.factors[j]->index_of(p0, q1);
                std::vector<int> stuple(nf - 1);
                for (int l = 0; l < j; ++l) stuple[l] = tuple[l];
                stuple[j] = merged;
                for (int l = j + 2; l < nf; ++l) stuple[l - 1] = tuple[l];
                int tgt = sw.offset;
                for (int l = 0; l < nf - 1; ++l) tgt += stuple[l] * sw.strides[l];
                int64_t sgn = ((suffix[j + 1] + (k - j - 1)) % 2 == 0) ? 1 : -1;
                out.push_back({tgt, w.offset + g, sgn});
            }
        }
    }

    std::vector<Entry> entries;
    size_t nnz = 0;
    for (const auto& v : per_word) nnz += v.size();
    entries.reserve(nnz);
    for (const auto& v : per_word) entries.insert(entries.end(), v.begin(), v.end());
    bar.complex_ = IntegerComplex(std::move(gens),
                                  IntegerMatrix(static_cast<int>(total), static_cast<int>(total),
                                                std::move(entries)));
    return bar;
}

CohomologyReport quotient_hom(const QuotientContext& ctx, const TwistedComplex& a,
                              const TwistedComplex& b, int level) {
    return cohomology(build_bar(ctx, a, b, level).complex());
}

bool is_right_orthogonal(const QuotientContext& ctx, const TwistedComplex& b) {
    for (const MorseCharacter& x : ctx.characters())
        if (!cohomology(hom_complex(x.model, b).complex()).is_zero()) return false;
    return true;
}

namespace {

// evaluation X (x) hom(X, b) -> b with the Koszul sign (-1)^{|x| |phi|}
IntegerMatrix evaluation_map(const TwistedComplex& x, const HomComplexWithBasis& hom,
                             const TwistedComplex& tensor, const TwistedComplex& b) {
    std::vector<Entry> es;
    const int nh = hom.size();
    for (int i = 0; i < x.size(); ++i) {
        for (int t = 0; t < nh; ++t) {
            auto [p, q] = hom.basis()[t];
            if (p != i) continue;
            int64_t sgn =
                ((x.gens()[i].degree * hom.complex().degree_of(t)) % 2 == 0) ? 1 : -1;
            es.push_back({q, i * nh + t, sgn});
        }
    }
    return IntegerMatrix(b.size(), tensor.size(), std::move(es));
}

} // namespace

TowerResult tower_replacement(const QuotientContext& ctx, const TwistedComplex& b, int max_iter) {
    if (max_iter < 1) throw ValidationError("tower_replacement needs max_iter >= 1");
    TwistedComplex cur = b;
    for (int it = 0;; ++it) {
        std::vector<HomComplexWithBasis> homs;
        bool orthogonal = true;
        for (const MorseCharacter& x : ctx.characters()) {
            homs.push_back(hom_complex(x.model, cur));
            if (!cohomology(homs.back().complex()).is_zero()) orthogonal = false;
        }
        if (orthogonal) return {cur, true, it};
        if (it == max_iter) return {cur, false, max_iter};

        TwistedComplex big = TwistedComplex::zero(ctx.poset());
        std::vector<Entry> ev_entries;
        int col_base = 0;
        for (size_t i = 0; i < ctx.characters().size(); ++i) {
            const TwistedComplex& x = ctx.characters()[i].model;
            if (homs[i].size() == 0) continue;
            TwistedComplex tensor = tensor_by_complex(x, homs[i].complex());
            IntegerMatrix ev = evaluation_map(x, homs[i], tensor, cur);
            for (const Entry& e : ev.entries()) ev_entries.push_back({e.row, col_base + e.col, e.val});
            col_base += tensor.size();
            big = direct_sum(big, tensor);
        }
        IntegerMatrix ev(cur.size(), big.size(), std::move(ev_entries));
        TwistedComplex next = gaussian_reduce(mapping_cone(big, cur, ev));
        if (next.size() > ctx.limits().twisted_generators)
            throw ResourceError("tower replacement exceeds the twisted-complex ceiling");
        cur = std::move(next);
    }
}

PeelReport peel(const std::vector<TwistedComplex>& collection, const TwistedComplex& m,
                ResourceLimits limits) {
    const int n = static_cast<int>(collection.size());
    if (n == 0) throw ValidationError("peel needs a nonempty collection");
    for (const TwistedComplex& x : collection)
        if (x.poset().get() != m.poset().get())
            throw ValidationError("peel collection over a different poset");

    // exceptional collection: endomorphisms Z id in degree 0, homs acyclic or
    // one-directional without cycles
    std::vector<std::vector<char>> above(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i) {
        auto self = cohomology(hom_complex(collection[i], collection[i]).complex());
        if (!(self.nonzero().size() == 1 && self.at(0) == DegreeData{1, {}}))
            throw ValidationError("collection is not exceptional: endomorphisms are not Z id");
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            above[i][j] = !cohomology(hom_complex(collection[i], collection[j]).complex()).is_zero();
        }
    }
    // cycle check by DFS
    {
        std::vector<int> state(n, 0);
        auto dfs = [&](auto&& self, int v) -> void {
            state[v] = 1;
            for (int w = 0; w < n; ++w)
                if (above[v][w]) {
                    if (state[w] == 1) throw ValidationError("collection is not exceptional: hom cycle");
                    if (state[w] == 0) self(self, w);
                }
            state[v] = 2;
        };
        for (int v = 0; v < n; ++v)
            if (state[v] == 0) dfs(dfs, v);
    }

    PeelReport report;
    report.multiplicities.resize(n);
    TwistedComplex cur = gaussian_reduce(m);
    std::vector<char> remaining(n, 1);
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        for (int i = 0; i < n && pick < 0; ++i) {
            if (!remaining[i]) continue;
            bool maximal = true;
            for (int j = 0; j < n; ++j)
                if (j != i && remaining[j] && above[i][j]) maximal = false;
            if (maximal) pick = i;
        }
        remaining[pick] = 0;
        HomComplexWithBasis f = hom_complex(collection[pick], cur);
        report.multiplicities[pick] = cohomology(f.complex());
        ++report.steps;
        if (f.size() == 0) continue;
        TwistedComplex tensor = tensor_by_complex(collection[pick], f.complex());
        IntegerMatrix ev = evaluation_map(collection[pick], f, tensor, cur);
        cur = gaussian_reduce(mapping_cone(tensor, cur, ev));
        if (cur.size() > limits.twisted_generators)
            throw ResourceError("peel residual exceeds the twisted-complex ceiling");
    }
    // generated means the residual is the zero object outright (for the full
    // representable collection this coincides with testing against every
    // member, and it also catches objects a partial collection cannot see)
    report.generated = true;
    for (int t = 0; t < m.poset()->size(); ++t)
        if (!cohomology(evaluate(cur, t)).is_zero()) report.generated = false;
    report.residual = std::move(cur);
    return report;
}

namespace {

// canonical cone map between nested castings (U and V both grow)
IntegerMatrix character_inclusion(const Casting& from, const Casting& to) {
    auto ruf = indicator_resolution(from.u);
    auto rvf = indicator_resolution(from.v);
    auto rut = indicator_resolution(to.u);
    auto rvt = indicator_resolution(to.v);
    IntegerMatrix iu = canonical_inclusion(ruf, rut);
    IntegerMatrix iv = canonical_inclusion(rvf, rvt);
    std::vector<Entry> es = iv.entries();
    for (const Entry& e : iu.entries())
        es.push_back({rvt.complex.size() + e.row, rvf.complex.size() + e.col, e.val});
    return IntegerMatrix(rvt.complex.size() + rut.complex.size(),
                         rvf.complex.size() + ruf.complex.size(), std::move(es));
}

// precompose the innermost factor with phi: A -> B, mapping bar(B -> c)
// words into bar(A -> c) words with the same letters
void precompose_entries(const BarComplex& src, const BarComplex& dst, const IntegerMatrix& phi,
                        std::vector<Entry>& out) {
    for (size_t wi = 0; wi < src.words().size(); ++wi) {
        const auto& w = src.words()[wi];
        if (w.block == 0) continue;
        int dwi = dst.word_index(w.letters);
        const auto& dw = dst.words()[dwi];
        const int nf = static_cast<int>(w.factors.size());
        std::vector<int> tuple(nf);
        for (int g = 0; g < w.block; ++g) {
            int rest = g;
            for (int j = 0; j < nf; ++j) {
                tuple[j] = rest % w.factors[j]->size();
                rest /= w.factors[j]->size();
            }
            auto [p, q] = w.factors[0]->basis()[tuple[0]];
            for (const Entry& e : phi.entries()) {
                if (e.row != p) continue; // phi[p][x]: component from x to p
                int t0 = dw.factors[0]->index_of(e.col, q);
                if (t0 < 0) continue;
                int tgt = dw.offset + t0 * dw.strides[0];
                for (int j = 1; j < nf; ++j) tgt += tuple[j] * dw.strides[j];
                out.push_back({tgt, w.offset + g, e.val});
            }
        }
    }
}

// postcompose the outermost factor with phi: A -> B, mapping bar(c -> A)
// words into bar(c -> B) words with the same letters
void postcompose_entries(const BarComplex& src, const BarComplex& dst, const IntegerMatrix& phi,
                         std::vector<Entry>& out) {
    for (size_t wi = 0; wi < src.words().size(); ++wi) {
        const auto& w = src.words()[wi];
        if (w.block == 0) continue;
        int dwi = dst.word_index(w.letters);
        const auto& dw = dst.words()[dwi];
        const int nf = static_cast<int>(w.factors.size());
        std::vector<int> tuple(nf);
        for (int g = 0; g < w.block; ++g) {
            int rest = g;
            for (int j = 0; j < nf; ++j) {
                tuple[j] = rest % w.factors[j]->size();
                rest /= w.factors[j]->size();
            }
            auto [p, q] = w.factors[nf - 1]->basis()[tuple[nf - 1]];
            for (const Entry& e : phi.entries()) {
                if (e.col != q) continue; // phi[y][q]: component from q to y
                int tk = dw.factors[nf - 1]->index_of(p, e.row);
                if (tk < 0) continue;
                int tgt = dw.offset + tk * dw.strides[nf - 1];
                for (int j = 0; j + 1 < nf; ++j) tgt += tuple[j] * dw.strides[j];
                out.push_back({tgt, w.offset + g, e.val});
            }
        }
    }
}

// does phi: A -> B admit a two-sided inverse class within level-N quotient
// complexes?
bool invertible_at_level(const QuotientContext& ctx, const TwistedComplex& a,
                         const TwistedComplex& b, const IntegerMatrix& phi, int level) {
    BarComplex qba = build_bar(ctx, b, a, level);
    BarComplex qaa = build_bar(ctx, a, a, level);
    BarComplex qbb = build_bar(ctx, b, b, level);

    auto degree_index = [](const BarComplex& q, int d) {
        std::vector<int> ids = q.indices_in_degree(d);
        std::map<int, int> pos;
        for (size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = static_cast<int>(i);
        return std::pair(ids, pos);
    };
    auto [z_ids, z_pos] = degree_index(qba, 0);
    auto [r1_ids, r1_pos] = degree_index(qba, 1);

    auto solve_side = [&](const BarComplex& qcc, bool left) -> bool {
        auto [h_ids, h_pos] = degree_index(qcc, -1);
        auto [r2_ids, r2_pos] = degree_index(qcc, 0);
        const int n1 = static_cast<int>(r1_ids.size());
        const int n2 = static_cast<int>(r2_ids.size());
        const int c1 = static_cast<int>(z_ids.size());
        const int c2 = static_cast<int>(h_ids.size());
        std::vector<Entry> es;
        for (const Entry& e : qba.complex().differential().entries()) {
            auto cp = z_pos.find(e.col);
            if (cp == z_pos.end()) continue;
            es.push_back({r1_pos.at(e.row), cp->second, e.val});
        }
        std::vector<Entry> comp;
        if (left)
            precompose_entries(qba, qcc, phi, comp);
        else
            postcompose_entries(qba, qcc, phi, comp);
        for (const Entry& e : comp) {
            auto cp = z_pos.find(e.col);
            if (cp == z_pos.end()) continue;
            es.push_back({n1 + r2_pos.at(e.row), cp->second, e.val});
        }
        for (const Entry& e : qcc.complex().differential().entries()) {
            auto cp = h_pos.find(e.col);
            if (cp == h_pos.end()) continue;
            es.push_back({n1 + r2_pos.at(e.row), c1 + cp->second, e.val});
        }
        TwistedComplex cc = left ? a : b;
        std::vector<int64_t> id_vec = qcc.length_zero_vector(identity_map(cc));
        std::vector<BigInt> rhs(n1 + n2, 0);
        for (int i = 0; i < qcc.complex().size(); ++i)
            if (id_vec[i] != 0) rhs[n1 + r2_pos.at(i)] = id_vec[i];
        IntegerMatrix sys(n1 + n2, c1 + c2, std::move(es));
        return solve_z(sys, rhs).has_value();
    };

    return solve_side(qaa, true) && solve_side(qbb, false);
}

} // namespace

namespace {

// transports the canonical cone map between castings onto the reduced
// models; reduced_phi = p_to . phi . i_from
bool reduced_invertible(const QuotientContext& ctx, const Casting& from, const Casting& to,
                        int level) {
    IntegerMatrix phi = character_inclusion(from, to);
    IntegerMatrix p_from, i_from, p_to, i_to;
    TwistedComplex a = gaussian_reduce(casting_cone(from), &p_from, &i_from);
    TwistedComplex b = gaussian_reduce(casting_cone(to), &p_to, &i_to);
    IntegerMatrix phi_red = p_to * (phi * i_from);
    if (!is_closed_degree0(a, b, phi_red)) return false;
    return invertible_at_level(ctx, a, b, phi_red, level);
}

} // namespace

IndependenceResult casting_independence(const QuotientContext& ctx, const MorseCharacter& x1,
                                        const MorseCharacter& x2, int level) {
    if (x1.cone == x2.cone) return {Independence::isomorphic_at_level, 0};

    auto nested = [](const MorseCharacter& a, const MorseCharacter& b) {
        return a.casting.u.subset_of(b.casting.u) && a.casting.v.subset_of(b.casting.v);
    };
    try {
        if (nested(x1, x2)) {
            if (reduced_invertible(ctx, x1.casting, x2.casting, level))
                return {Independence::isomorphic_at_level, level};
            return {Independence::indeterminate, level};
        }
        if (nested(x2, x1)) {
            if (reduced_invertible(ctx, x2.casting, x1.casting, level))
                return {Independence::isomorphic_at_level, level};
            return {Independence::indeterminate, level};
        }
        // compare both with the intersection casting
        Casting meet(x1.casting.u.intersect(x2.casting.u), x1.casting.v.intersect(x2.casting.v),
                     x1.casting.target);
        if (reduced_invertible(ctx, meet, x1.casting, level) &&
            reduced_invertible(ctx, meet, x2.casting, level))
            return {Independence::isomorphic_at_level, level};
        return {Independence::indeterminate, level};
    } catch (const ResourceError&) {
        return {Independence::indeterminate, level};
    }
}

QuotientContext stop_removal(const QuotientContext& ctx, const StopSpec1D& smaller) {
    if (!ctx.manifold().has_value())
        throw ValidationError("stop_removal needs a context built over a 1-manifold");
    const Manifold1D& m = *ctx.manifold();
    for (const ConormalPoint& p : smaller.points)
        if (!ctx.lambda().contains(p))
            throw ValidationError("stop_removal: the smaller stop must be a subset of the kept one");

    std::vector<MorseCharacter> characters = ctx.characters();
    for (ConormalPoint p : conormal_points(m)) {
        if (!ctx.lambda().contains(p) || smaller.contains(p)) continue;
        Casting c = minimal_casting(m, p.vertex, p.sign);
        if (!validate_casting_1d(m, c, smaller))
            throw ValidationError("stop_removal produced an invalid casting");
        characters.push_back(morse_character(c));
    }
    return QuotientContext(ctx.poset(), std::move(characters), m, smaller, ctx.limits());
}

} // namespace mmt
