#include "mmt/twisted.hpp"

#include <algorithm>
#include <map>

namespace mmt {

TwistedComplex::TwistedComplex(PosetPtr poset, std::vector<TwGen> gens, IntegerMatrix diff)
    : poset_(std::move(poset)), gens_(std::move(gens)), diff_(std::move(diff)) {
    const int n = static_cast<int>(gens_.size());
    if (diff_.rows() != n || diff_.cols() != n)
        throw ValidationError("twisted differential shape mismatch");
    for (const TwGen& g : gens_)
        if (g.stratum < 0 || g.stratum >= poset_->size())
            throw ValidationError("twisted generator carrier out of range");
    for (const Entry& e : diff_.entries()) {
        if (!poset_->leq(gens_[e.row].stratum, gens_[e.col].stratum))
            throw ValidationError("twisted differential entry without canonical morphism");
        if (gens_[e.row].degree != gens_[e.col].degree + 1)
            throw ValidationError("twisted differential entry must raise degree by 1");
    }
    if (!(diff_ * diff_).is_zero()) throw ValidationError("twisted differential does not square to zero");
}

TwistedComplex TwistedComplex::zero(PosetPtr poset) {
    return TwistedComplex(std::move(poset), {}, IntegerMatrix(0, 0));
}

TwistedComplex representable(const PosetPtr& poset, int s) {
    if (s < 0 || s >= poset->size()) throw ValidationError("stratum out of range");
    return TwistedComplex(poset, {TwGen{s, 0}}, IntegerMatrix(1, 1));
}

TwistedComplex shift(const TwistedComplex& a, int k) {
    std::vector<TwGen> gens = a.gens();
    for (TwGen& g : gens) g.degree -= k;
    IntegerMatrix d = (k % 2 == 0) ? a.diff() : -a.diff();
    return TwistedComplex(a.poset(), std::move(gens), std::move(d));
}

TwistedComplex direct_sum(const TwistedComplex& a, const TwistedComplex& b) {
    if (a.poset().get() != b.poset().get()) throw ValidationError("direct sum across different posets");
    std::vector<TwGen> gens = a.gens();
    gens.insert(gens.end(), b.gens().begin(), b.gens().end());
    std::vector<Entry> es = a.diff().entries();
    for (const Entry& e : b.diff().entries()) es.push_back({e.row + a.size(), e.col + a.size(), e.val});
    return TwistedComplex(a.poset(), std::move(gens),
                          IntegerMatrix(a.size() + b.size(), a.size() + b.size(), std::move(es)));
}

TwistedComplex tensor_by_complex(const TwistedComplex& a, const IntegerComplex& c) {
    const int nc = c.size();
    std::vector<TwGen> gens;
    gens.reserve(static_cast<size_t>(a.size()) * nc);
    for (const TwGen& g : a.gens())
        for (int k = 0; k < nc; ++k) gens.push_back({g.stratum, g.degree + c.degree_of(k)});
    std::vector<Entry> es;
    for (const Entry& e : a.diff().entries())
        for (int k = 0; k < nc; ++k) es.push_back({e.row * nc + k, e.col * nc + k, e.val});
    for (int i = 0; i < a.size(); ++i) {
        int64_t sgn = (a.gens()[i].degree % 2 == 0) ? 1 : -1;
        for (const Entry& e : c.differential().entries())
            es.push_back({i * nc + e.row, i * nc + e.col, sgn * e.val});
    }
    return TwistedComplex(a.poset(), std::move(gens),
                          IntegerMatrix(a.size() * nc, a.size() * nc, std::move(es)));
}

HomComplexWithBasis::HomComplexWithBasis(IntegerComplex complex, std::vector<std::pair<int, int>> basis)
    : complex_(std::move(complex)), basis_(std::move(basis)) {}

int HomComplexWithBasis::index_of(int i, int j) const {
    auto it = std::lower_bound(basis_.begin(), basis_.end(), std::pair(i, j));
    if (it != basis_.end() && *it == std::pair(i, j)) return static_cast<int>(it - basis_.begin());
    return -1;
}

HomComplexWithBasis hom_complex(const TwistedComplex& a, const TwistedComplex& b) {
    if (a.poset().get() != b.poset().get()) throw ValidationError("hom across different posets");
    const FacePoset& poset = *a.poset();
    std::vector<std::pair<int, int>> basis;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j)
            if (poset.leq(b.gens()[j].stratum, a.gens()[i].stratum)) basis.push_back({i, j});
    const int n = static_cast<int>(basis.size());
    std::vector<int> index(static_cast<size_t>(a.size()) * std::max(b.size(), 1), -1);
    auto slot = [&](int i, int j) -> int& { return index[static_cast<size_t>(i) * b.size() + j]; };
    for (int k = 0; k < n; ++k) slot(basis[k].first, basis[k].second) = k;

    std::vector<Generator> gens(n);
    for (int k = 0; k < n; ++k)
        gens[k] = {"", b.gens()[basis[k].second].degree - a.gens()[basis[k].first].degree};

    std::vector<std::vector<Entry>> b_by_col(b.size()), a_by_row(a.size());
    for (const Entry& e : b.diff().entries()) b_by_col[e.col].push_back(e);
    for (const Entry& e : a.diff().entries()) a_by_row[e.row].push_back(e);

    // delta(phi) = D_b . phi - (-1)^{deg phi} phi . D_a
    std::vector<Entry> es;
    for (int k = 0; k < n; ++k) {
        auto [i, j] = basis[k];
        for (const Entry& e : b_by_col[j]) {
            int k2 = slot(i, e.row);
            es.push_back({k2, k, e.val});
        }
        int64_t sgn = (gens[k].degree % 2 == 0) ? -1 : 1; // -(-1)^{deg}
        for (const Entry& e : a_by_row[i]) {
            int k2 = slot(e.col, j);
            es.push_back({k2, k, sgn * e.val});
        }
    }
    return HomComplexWithBasis(IntegerComplex(std::move(gens), IntegerMatrix(n, n, std::move(es))),
                               std::move(basis));
}

bool is_valid_map(const TwistedComplex& a, const TwistedComplex& b, const IntegerMatrix& f,
                  int degree) {
    if (f.rows() != b.size() || f.cols() != a.size()) return false;
    for (const Entry& e : f.entries()) {
        if (!a.poset()->leq(b.gens()[e.row].stratum, a.gens()[e.col].stratum)) return false;
        if (b.gens()[e.row].degree != a.gens()[e.col].degree + degree) return false;
    }
    return true;
}

bool is_closed_degree0(const TwistedComplex& a, const TwistedComplex& b, const IntegerMatrix& f) {
    if (!is_valid_map(a, b, f, 0)) return false;
    return (b.diff() * f) == (f * a.diff());
}

IntegerMatrix identity_map(const TwistedComplex& a) {
    return IntegerMatrix::identity(a.size());
}

IntegerMatrix compose_maps(const IntegerMatrix& f, const IntegerMatrix& g) {
    return g * f;
}

std::vector<int64_t> to_hom_vector(const HomComplexWithBasis& hom, const IntegerMatrix& f) {
    std::vector<int64_t> v(hom.size(), 0);
    for (const Entry& e : f.entries()) {
        int k = hom.index_of(e.col, e.row);
        if (k < 0) throw ValidationError("map has a component outside the hom basis");
        v[k] = e.val;
    }
    return v;
}

IntegerMatrix from_hom_vector(const TwistedComplex& a, const TwistedComplex& b,
                              const HomComplexWithBasis& hom, const std::vector<int64_t>& v) {
    if (v.size() != static_cast<size_t>(hom.size())) throw ValidationError("hom vector size mismatch");
    std::vector<Entry> es;
    for (int k = 0; k < hom.size(); ++k)
        if (v[k] != 0) es.push_back({hom.basis()[k].second, hom.basis()[k].first, v[k]});
    return IntegerMatrix(b.size(), a.size(), std::move(es));
}

TwistedComplex mapping_cone(const TwistedComplex& a, const TwistedComplex& b,
                            const IntegerMatrix& f) {
    if (a.poset().get() != b.poset().get()) throw ValidationError("cone across different posets");
    if (!is_closed_degree0(a, b, f))
        throw ValidationError("mapping cone requires a closed degree-0 map");
    std::vector<TwGen> gens = b.gens();
    for (const TwGen& g : a.gens()) gens.push_back({g.stratum, g.degree - 1});
    std::vector<Entry> es = b.diff().entries();
    for (const Entry& e : f.entries()) es.push_back({e.row, b.size() + e.col, e.val});
    for (const Entry& e : a.diff().entries())
        es.push_back({b.size() + e.row, b.size() + e.col, -e.val});
    return TwistedComplex(a.poset(), std::move(gens),
                          IntegerMatrix(a.size() + b.size(), a.size() + b.size(), std::move(es)));
}

IntegerComplex evaluate(const TwistedComplex& a, int t) {
    return evaluate(a, t, nullptr);
}

IntegerComplex evaluate(const TwistedComplex& a, int t, std::vector<int>* gen_ids) {
    if (t < 0 || t >= a.poset()->size()) throw ValidationError("stratum out of range");
    std::vector<int> keep, pos(a.size(), -1);
    for (int i = 0; i < a.size(); ++i)
        if (a.poset()->leq(a.gens()[i].stratum, t)) {
            pos[i] = static_cast<int>(keep.size());
            keep.push_back(i);
        }
    std::vector<Generator> gens;
    gens.reserve(keep.size());
    for (int i : keep) gens.push_back({a.poset()->complex().stratum_key(a.gens()[i].stratum), a.gens()[i].degree});
    std::vector<Entry> es;
    for (const Entry& e : a.diff().entries())
        if (pos[e.row] >= 0 && pos[e.col] >= 0) es.push_back({pos[e.row], pos[e.col], e.val});
    if (gen_ids) *gen_ids = keep;
    return IntegerComplex(std::move(gens),
                          IntegerMatrix(static_cast<int>(keep.size()), static_cast<int>(keep.size()), std::move(es)));
}

bool verify_quasi_iso(const TwistedComplex& a, const TwistedComplex& b, const IntegerMatrix& f) {
    TwistedComplex k = mapping_cone(a, b, f);
    for (int t = 0; t < a.poset()->size(); ++t)
        if (!cohomology(evaluate(k, t)).is_zero()) return false;
    return true;
}

TwistedComplex gaussian_reduce(const TwistedComplex& a, IntegerMatrix* projection,
                               IntegerMatrix* inclusion) {
    const int n = a.size();
    std::vector<std::map<int, int64_t>> col(n); // col[j]: i -> D[i][j]
    std::vector<std::map<int, int64_t>> row(n);
    for (const Entry& e : a.diff().entries()) {
        col[e.col][e.row] = e.val;
        row[e.row][e.col] = e.val;
    }
    std::vector<char> dead(n, 0);
    const bool track = projection != nullptr || inclusion != nullptr;
    // p maps the original onto the survivors, i splits it back; both get a
    // correction per cancelled pivot (homological perturbation)
    std::vector<std::map<int, int64_t>> p_cols(track ? n : 0); // p[.][orig]
    std::vector<std::map<int, int64_t>> i_cols(track ? n : 0); // i[.][surv]
    if (track)
        for (int k = 0; k < n; ++k) {
            p_cols[k][k] = 1;
            i_cols[k][k] = 1;
        }

    auto set_val = [&](int i, int j, int64_t v) {
        if (v == 0) {
            col[j].erase(i);
            row[i].erase(j);
        } else {
            col[j][i] = v;
            row[i][j] = v;
        }
    };

    for (;;) {
        int pi = -1, pj = -1;
        for (int j = 0; j < n && pi < 0; ++j) {
            if (dead[j]) continue;
            for (const auto& [i, v] : col[j])
                if (!dead[i] && (v == 1 || v == -1) && a.gens()[i].stratum == a.gens()[j].stratum) {
                    pi = i;
                    pj = j;
                    break;
                }
        }
        if (pi < 0) break;
        int64_t pv = col[pj][pi]; // the pivot D[pi][pj], pj the source generator
        std::vector<std::pair<int, int64_t>> via_col(col[pj].begin(), col[pj].end());
        std::vector<std::pair<int, int64_t>> via_row(row[pi].begin(), row[pi].end());
        if (track) {
            // p(pi) gains -pv^{-1} * (column pj of D without the pivot);
            // i(r) gains -pv^{-1} * D[pi][r] * pj for every surviving r
            for (size_t k = 0; k < p_cols.size(); ++k) {
                auto it = p_cols[k].find(pi);
                if (it == p_cols[k].end()) continue;
                int64_t c = it->second;
                p_cols[k].erase(it);
                for (const auto& [x, vx] : via_col) {
                    if (x == pi) continue;
                    int64_t& slot = p_cols[k][x];
                    slot = add_ck(slot, -mul_ck(mul_ck(c, pv), vx));
                    if (slot == 0) p_cols[k].erase(x);
                }
            }
            std::map<int, int64_t> pj_col = i_cols[pj];
            for (const auto& [r, vr] : via_row) {
                if (r == pj || dead[r]) continue;
                for (const auto& [tgt, c] : pj_col) {
                    int64_t& slot = i_cols[r][tgt];
                    slot = add_ck(slot, -mul_ck(mul_ck(pv, vr), c));
                    if (slot == 0) i_cols[r].erase(tgt);
                }
            }
            i_cols[pi].clear();
            i_cols[pj].clear();
            for (size_t k = 0; k < p_cols.size(); ++k) p_cols[k].erase(pj);
        }
        // D'[x][y] = D[x][y] - D[x][pj] * pv^{-1} * D[pi][y]
        for (const auto& [x, vx] : via_col) {
            if (x == pi || dead[x]) continue;
            for (const auto& [y, vy] : via_row) {
                if (y == pj || dead[y]) continue;
                int64_t cur = 0;
                if (auto it = row[x].find(y); it != row[x].end()) cur = it->second;
                set_val(x, y, add_ck(cur, -mul_ck(mul_ck(vx, pv), vy)));
            }
        }
        dead[pi] = dead[pj] = 1;
        for (const auto& [y, v] : std::map<int, int64_t>(row[pi])) set_val(pi, y, 0);
        for (const auto& [x, v] : std::map<int, int64_t>(col[pj])) set_val(x, pj, 0);
        for (const auto& [x, v] : std::map<int, int64_t>(col[pi])) set_val(x, pi, 0);
        for (const auto& [y, v] : std::map<int, int64_t>(row[pj])) set_val(pj, y, 0);
    }

    std::vector<int> keep, pos(n, -1);
    for (int i = 0; i < n; ++i)
        if (!dead[i]) {
            pos[i] = static_cast<int>(keep.size());
            keep.push_back(i);
        }
    std::vector<TwGen> gens;
    for (int i : keep) gens.push_back(a.gens()[i]);
    std::vector<Entry> es;
    for (int i : keep)
        for (const auto& [j, v] : row[i])
            if (!dead[j]) es.push_back({pos[i], pos[j], v});
    const int r = static_cast<int>(keep.size());
    if (projection) {
        std::vector<Entry> pe;
        for (int orig = 0; orig < n; ++orig)
            for (const auto& [tgt, v] : p_cols[orig])
                pe.push_back({pos[tgt], orig, v});
        *projection = IntegerMatrix(r, n, std::move(pe));
    }
    if (inclusion) {
        std::vector<Entry> ie;
        for (int surv = 0; surv < n; ++surv) {
            if (pos[surv] < 0) continue;
            for (const auto& [tgt, v] : i_cols[surv]) ie.push_back({tgt, pos[surv], v});
        }
        *inclusion = IntegerMatrix(n, r, std::move(ie));
    }
    return TwistedComplex(a.poset(), std::move(gens),
                          IntegerMatrix(r, r, std::move(es)));
}

} // namespace mmt
