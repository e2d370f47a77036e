#include "mmt/zchain.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

// Smith normal form and integer linear solving.
//
// Both run a sparse sweep that eliminates with +-1 pivots (unimodular row and
// column operations, so no coefficient growth at the pivot), then finish the
// residual block with the dense textbook algorithm.  The whole computation
// runs on checked int64 first and is retried with arbitrary-precision
// integers if anything overflows.

namespace mmt {
namespace {

template <class T>
struct Ops;

template <>
struct Ops<int64_t> {
    static int64_t add(int64_t a, int64_t b) { return add_ck(a, b); }
    static int64_t mul(int64_t a, int64_t b) { return mul_ck(a, b); }
    static int64_t from(int64_t v) { return v; }
    static bool abs_less(int64_t a, int64_t b) {
        if (a == std::numeric_limits<int64_t>::min() || b == std::numeric_limits<int64_t>::min())
            throw OverflowError();
        return std::abs(a) < std::abs(b);
    }
};

template <>
struct Ops<BigInt> {
    static BigInt add(const BigInt& a, const BigInt& b) { return a + b; }
    static BigInt mul(const BigInt& a, const BigInt& b) { return a * b; }
    static BigInt from(int64_t v) { return BigInt(v); }
    static bool abs_less(const BigInt& a, const BigInt& b) { return abs(a) < abs(b); }
};

template <class T>
bool is_unit(const T& v) {
    return v == 1 || v == -1;
}

// Dense Smith normal form; diagonal satisfies the divisibility chain and is
// positive.  Optionally tracks the row transform u (u*a*v = d) and the column
// transform v, which the solver needs.
template <class T>
std::vector<T> dense_snf(std::vector<std::vector<T>> m, std::vector<std::vector<T>>* u_out,
                         std::vector<std::vector<T>>* v_out) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
    std::vector<std::vector<T>> u, v;
    if (u_out) {
        u.assign(rows, std::vector<T>(rows, T(0)));
        for (int i = 0; i < rows; ++i) u[i][i] = T(1);
    }
    if (v_out) {
        v.assign(cols, std::vector<T>(cols, T(0)));
        for (int i = 0; i < cols; ++i) v[i][i] = T(1);
    }

    auto row_sub = [&](int dst, int src, const T& q) { // row dst -= q * row src
        for (int j = 0; j < cols; ++j) m[dst][j] = Ops<T>::add(m[dst][j], Ops<T>::mul(T(0) - q, m[src][j]));
        if (u_out)
            for (int j = 0; j < rows; ++j) u[dst][j] = Ops<T>::add(u[dst][j], Ops<T>::mul(T(0) - q, u[src][j]));
    };
    auto col_sub = [&](int dst, int src, const T& q) { // col dst -= q * col src
        for (int i = 0; i < rows; ++i) m[i][dst] = Ops<T>::add(m[i][dst], Ops<T>::mul(T(0) - q, m[i][src]));
        if (v_out)
            for (int i = 0; i < cols; ++i) v[i][dst] = Ops<T>::add(v[i][dst], Ops<T>::mul(T(0) - q, v[i][src]));
    };
    auto row_swap = [&](int a, int b) {
        std::swap(m[a], m[b]);
        if (u_out) std::swap(u[a], u[b]);
    };
    auto col_swap = [&](int a, int b) {
        for (int i = 0; i < rows; ++i) std::swap(m[i][a], m[i][b]);
        if (v_out)
            for (int i = 0; i < cols; ++i) std::swap(v[i][a], v[i][b]);
    };
    auto row_negate = [&](int a) {
        for (int j = 0; j < cols; ++j) m[a][j] = T(0) - m[a][j];
        if (u_out)
            for (int j = 0; j < rows; ++j) u[a][j] = T(0) - u[a][j];
    };
    // floor division quotient for the Euclid step
    auto quot = [](const T& a, const T& b) {
        T q = a / b;
        if (a - q * b != 0 && ((a < 0) != (b < 0))) q = q - 1;
        return q;
    };

    const int steps = std::min(rows, cols);
    int k = 0;
    for (; k < steps; ++k) {
        // pivot: smallest nonzero absolute value in the lower-right block
        int pr = -1, pc = -1;
        for (int i = k; i < rows; ++i)
            for (int j = k; j < cols; ++j)
                if (m[i][j] != 0 && (pr < 0 || Ops<T>::abs_less(m[i][j], m[pr][pc]))) { pr = i; pc = j; }
        if (pr < 0) break;
        row_swap(k, pr);
        col_swap(k, pc);

        for (;;) {
            bool clean = true;
            for (int i = k + 1; i < rows; ++i) {
                if (m[i][k] == 0) continue;
                T q = quot(m[i][k], m[k][k]);
                row_sub(i, k, q);
                if (m[i][k] != 0) { row_swap(k, i); clean = false; }
            }
            for (int j = k + 1; j < cols; ++j) {
                if (m[k][j] == 0) continue;
                T q = quot(m[k][j], m[k][k]);
                col_sub(j, k, q);
                if (m[k][j] != 0) { col_swap(k, j); clean = false; }
            }
            if (!clean) continue;
            // divisibility: pivot must divide every remaining entry
            bool fixed = false;
            for (int i = k + 1; i < rows && !fixed; ++i)
                for (int j = k + 1; j < cols && !fixed; ++j)
                    if (m[i][j] % m[k][k] != 0) {
                        row_sub(k, i, T(-1)); // add row i to row k, then re-reduce
                        fixed = true;
                    }
            if (!fixed) break;
        }
        if (m[k][k] < 0) row_negate(k);
    }

    std::vector<T> diag;
    for (int i = 0; i < k; ++i) diag.push_back(m[i][i]);
    if (u_out) *u_out = std::move(u);
    if (v_out) *v_out = std::move(v);
    return diag;
}

// Sparse +-1 elimination.  Column-major state with a lazy priority queue of
// candidate unit pivots scored by Markowitz fill.
template <class T>
struct SparseEliminator {
    int rows, cols;
    std::vector<std::map<int, T>> col;
    std::vector<std::set<int>> rowcols;
    std::vector<char> row_done, col_done;
    // (score, row, col); lazy entries are revalidated on pop
    using Cand = std::tuple<int64_t, int, int>;
    std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap;
    int unit_pivots = 0;

    explicit SparseEliminator(const IntegerMatrix& a)
        : rows(a.rows()), cols(a.cols()), col(a.cols()), rowcols(a.rows()),
          row_done(a.rows(), 0), col_done(a.cols(), 0) {
        for (const Entry& e : a.entries()) {
            col[e.col][e.row] = Ops<T>::from(e.val);
            rowcols[e.row].insert(e.col);
        }
        for (int c = 0; c < cols; ++c)
            for (const auto& [r, v] : col[c])
                if (is_unit(v)) push_candidate(r, c);
    }

    int64_t score(int r, int c) const {
        return static_cast<int64_t>(rowcols[r].size() - 1) * static_cast<int64_t>(col[c].size() - 1);
    }

    void push_candidate(int r, int c) { heap.push({score(r, c), r, c}); }

    void set_entry(int c, int r, const T& v) {
        if (v == 0) {
            col[c].erase(r);
            rowcols[r].erase(c);
        } else {
            bool fresh = col[c].insert_or_assign(r, v).second;
            if (fresh) rowcols[r].insert(c);
            if (is_unit(v)) push_candidate(r, c);
        }
    }

    void run() {
        while (!heap.empty()) {
            auto [sc, r, c] = heap.top();
            heap.pop();
            if (row_done[r] || col_done[c]) continue;
            auto it = col[c].find(r);
            if (it == col[c].end() || !is_unit(it->second)) continue;
            if (score(r, c) != sc) { push_candidate(r, c); continue; }
            pivot(r, c, it->second);
        }
    }

    void pivot(int r, int c, const T& v) {
        // column ops clear row r outside column c
        std::vector<int> other_cols(rowcols[r].begin(), rowcols[r].end());
        for (int c2 : other_cols) {
            if (c2 == c) continue;
            T f = Ops<T>::mul(col[c2][r], v); // entry / pivot, pivot = +-1
            for (const auto& [r2, pv] : col[c]) {
                if (r2 == r) continue;
                auto jt = col[c2].find(r2);
                T nv = Ops<T>::add(jt == col[c2].end() ? T(0) : jt->second, Ops<T>::mul(T(0) - f, pv));
                set_entry(c2, r2, nv);
            }
            col[c2].erase(r);
            rowcols[r].erase(c2);
        }
        // row r is now supported on column c alone, so clearing column c by
        // row ops just deletes its other entries
        for (const auto& [r2, pv] : col[c])
            if (r2 != r) rowcols[r2].erase(c);
        col[c].clear();
        rowcols[r].clear();
        row_done[r] = 1;
        col_done[c] = 1;
        ++unit_pivots;
    }

    // remaining entries as a dense block
    std::vector<std::vector<T>> residual() const {
        std::vector<int> act_rows, act_cols;
        std::vector<int> rpos(rows, -1), cpos(cols, -1);
        for (int c = 0; c < cols; ++c)
            if (!col_done[c] && !col[c].empty()) {
                cpos[c] = static_cast<int>(act_cols.size());
                act_cols.push_back(c);
            }
        for (int r = 0; r < rows; ++r)
            if (!row_done[r] && !rowcols[r].empty()) {
                rpos[r] = static_cast<int>(act_rows.size());
                act_rows.push_back(r);
            }
        std::vector<std::vector<T>> m(act_rows.size(), std::vector<T>(act_cols.size(), T(0)));
        for (int c = 0; c < cols; ++c) {
            if (cpos[c] < 0) continue;
            for (const auto& [r, v] : col[c]) m[rpos[r]][cpos[c]] = v;
        }
        return m;
    }
};

template <class T>
SmithResult snf_impl(const IntegerMatrix& a) {
    SparseEliminator<T> elim(a);
    elim.run();
    std::vector<T> diag = dense_snf<T>(elim.residual(), nullptr, nullptr);
    SmithResult out;
    for (int i = 0; i < elim.unit_pivots; ++i) out.invariants.emplace_back(1);
    for (const T& d : diag)
        if (d != 0) out.invariants.emplace_back(d);
    return out;
}

// Row-major solver state for a*x = b over Z.
template <class T>
struct RowSolver {
    int rows, cols;
    std::vector<std::map<int, T>> row;
    std::vector<std::set<int>> colrows;
    std::vector<T> rhs;
    std::vector<char> row_done, col_done;
    std::vector<std::pair<int, int>> pivots; // (row, col), in elimination order

    RowSolver(const IntegerMatrix& a, const std::vector<BigInt>& b)
        : rows(a.rows()), cols(a.cols()), row(a.rows()), colrows(a.cols()),
          rhs(a.rows()), row_done(a.rows(), 0), col_done(a.cols(), 0) {
        for (const Entry& e : a.entries()) {
            row[e.row][e.col] = Ops<T>::from(e.val);
            colrows[e.col].insert(e.row);
        }
        for (int r = 0; r < rows; ++r) {
            if constexpr (std::is_same_v<T, int64_t>) {
                if (b[r] < std::numeric_limits<int64_t>::min() || b[r] > std::numeric_limits<int64_t>::max())
                    throw OverflowError();
                rhs[r] = static_cast<int64_t>(b[r]);
            } else {
                rhs[r] = b[r];
            }
        }
    }

    std::optional<std::vector<BigInt>> solve() {
        // unit-pivot sweep with row operations only; lazy candidate heap
        using Cand = std::tuple<int64_t, int, int>;
        std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap;
        auto score = [&](int r, int c) {
            return static_cast<int64_t>(row[r].size() - 1) *
                   static_cast<int64_t>(colrows[c].size() - 1);
        };
        for (int r = 0; r < rows; ++r)
            for (const auto& [c, v] : row[r])
                if (is_unit(v)) heap.push({score(r, c), r, c});
        pending_units = &heap;
        while (!heap.empty()) {
            auto [sc, r, c] = heap.top();
            heap.pop();
            if (row_done[r] || col_done[c]) continue;
            auto it = row[r].find(c);
            if (it == row[r].end() || !is_unit(it->second)) continue;
            if (score(r, c) != sc) {
                heap.push({score(r, c), r, c});
                continue;
            }
            pivot(r, c);
        }
        pending_units = nullptr;

        // dense residual solve via SNF transforms
        std::vector<int> act_rows, act_cols;
        std::vector<int> cpos(cols, -1);
        for (int r = 0; r < rows; ++r)
            if (!row_done[r] && !row[r].empty()) act_rows.push_back(r);
        for (int c = 0; c < cols; ++c)
            if (!col_done[c] && !colrows[c].empty()) {
                cpos[c] = static_cast<int>(act_cols.size());
                act_cols.push_back(c);
            }
        std::vector<BigInt> x(cols, 0);
        if (!act_rows.empty()) {
            std::vector<std::vector<T>> m(act_rows.size(), std::vector<T>(act_cols.size(), T(0)));
            std::vector<T> bd(act_rows.size());
            for (size_t i = 0; i < act_rows.size(); ++i) {
                for (const auto& [c, v] : row[act_rows[i]]) m[i][cpos[c]] = v;
                bd[i] = rhs[act_rows[i]];
            }
            std::vector<std::vector<T>> u, v;
            std::vector<T> diag = dense_snf<T>(m, &u, &v);
            std::vector<T> y(act_rows.size(), T(0));
            for (size_t i = 0; i < act_rows.size(); ++i)
                for (size_t j = 0; j < act_rows.size(); ++j)
                    y[i] = Ops<T>::add(y[i], Ops<T>::mul(u[i][j], bd[j]));
            std::vector<T> xd(act_cols.size(), T(0));
            for (size_t i = 0; i < act_rows.size(); ++i) {
                if (i < diag.size() && diag[i] != 0) {
                    if (y[i] % diag[i] != 0) return std::nullopt;
                    xd[i] = y[i] / diag[i];
                } else if (y[i] != 0) {
                    return std::nullopt;
                }
            }
            for (size_t c = 0; c < act_cols.size(); ++c) {
                T acc(0);
                for (size_t j = 0; j < act_cols.size(); ++j)
                    acc = Ops<T>::add(acc, Ops<T>::mul(v[c][j], xd[j]));
                x[act_cols[c]] = BigInt(acc);
            }
        }
        // rows untouched by any pivot and empty must have zero rhs
        for (int r = 0; r < rows; ++r)
            if (!row_done[r] && row[r].empty() && rhs[r] != 0) return std::nullopt;

        // back-substitute unit pivots in reverse order
        for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
            auto [r, c] = *it;
            BigInt acc = BigInt(rhs[r]);
            T pv(0);
            for (const auto& [c2, v] : row[r]) {
                if (c2 == c) {
                    pv = v;
                    continue;
                }
                acc -= BigInt(v) * x[c2];
            }
            x[c] = (pv == 1) ? acc : -acc;
        }
        return x;
    }

    using CandHeap = std::priority_queue<std::tuple<int64_t, int, int>,
                                         std::vector<std::tuple<int64_t, int, int>>,
                                         std::greater<std::tuple<int64_t, int, int>>>;
    CandHeap* pending_units = nullptr;

    void note_unit(int r, int c) {
        if (!pending_units) return;
        int64_t sc = static_cast<int64_t>(row[r].size() - 1) *
                     static_cast<int64_t>(colrows[c].size() - 1);
        pending_units->push({sc, r, c});
    }

    void pivot(int r, int c) {
        T v = row[r][c];
        std::vector<int> others(colrows[c].begin(), colrows[c].end());
        for (int r2 : others) {
            if (r2 == r || row_done[r2]) continue;
            T f = Ops<T>::mul(row[r2][c], v);
            for (const auto& [c2, pv] : row[r]) {
                auto jt = row[r2].find(c2);
                T nv = Ops<T>::add(jt == row[r2].end() ? T(0) : jt->second, Ops<T>::mul(T(0) - f, pv));
                if (nv == 0) {
                    row[r2].erase(c2);
                    colrows[c2].erase(r2);
                } else {
                    if (row[r2].insert_or_assign(c2, nv).second) colrows[c2].insert(r2);
                    if (is_unit(nv) && !col_done[c2]) note_unit(r2, c2);
                }
            }
            rhs[r2] = Ops<T>::add(rhs[r2], Ops<T>::mul(T(0) - f, rhs[r]));
        }
        row_done[r] = 1;
        col_done[c] = 1;
        for (const auto& [c2, pv] : row[r]) colrows[c2].erase(r);
        pivots.push_back({r, c});
    }
};

} // namespace

SmithResult smith_normal_form(const IntegerMatrix& a) {
    try {
        return snf_impl<int64_t>(a);
    } catch (const OverflowError&) {
        return snf_impl<BigInt>(a);
    }
}

int matrix_rank(const IntegerMatrix& a) {
    return smith_normal_form(a).rank();
}

std::optional<std::vector<BigInt>> solve_z(const IntegerMatrix& a, const std::vector<BigInt>& b) {
    if (static_cast<int>(b.size()) != a.rows()) throw ValidationError("solve_z shape mismatch");
    try {
        RowSolver<int64_t> s(a, b);
        return s.solve();
    } catch (const OverflowError&) {
        RowSolver<BigInt> s(a, b);
        return s.solve();
    }
}

} // namespace mmt
