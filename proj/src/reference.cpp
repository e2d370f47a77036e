#include "mmt/reference.hpp"

#include <algorithm>
#include <map>

namespace mmt::ref {

namespace {

bool find_nonzero(const std::vector<std::vector<BigInt>>& m, int k, int& pr, int& pc) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
    pr = pc = -1;
    for (int i = k; i < rows; ++i)
        for (int j = k; j < cols; ++j)
            if (m[i][j] != 0 && (pr < 0 || abs(m[i][j]) < abs(m[pr][pc]))) { pr = i; pc = j; }
    return pr >= 0;
}

} // namespace

std::vector<BigInt> dense_smith(std::vector<std::vector<BigInt>> m) {
    const int rows = static_cast<int>(m.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
    std::vector<BigInt> diag;
    for (int k = 0; k < std::min(rows, cols); ++k) {
        int pr, pc;
        if (!find_nonzero(m, k, pr, pc)) break;
        std::swap(m[k], m[pr]);
        for (int i = 0; i < rows; ++i) std::swap(m[i][k], m[i][pc]);
        for (;;) {
            bool again = false;
            for (int i = k + 1; i < rows; ++i) {
                if (m[i][k] == 0) continue;
                BigInt q = m[i][k] / m[k][k];
                for (int j = k; j < cols; ++j) m[i][j] -= q * m[k][j];
                if (m[i][k] != 0) { std::swap(m[k], m[i]); again = true; }
            }
            for (int j = k + 1; j < cols; ++j) {
                if (m[k][j] == 0) continue;
                BigInt q = m[k][j] / m[k][k];
                for (int i = k; i < rows; ++i) m[i][j] -= q * m[i][k];
                if (m[k][j] != 0) {
                    for (int i = k; i < rows; ++i) std::swap(m[i][k], m[i][j]);
                    again = true;
                }
            }
            if (again) continue;
            bool fixed = false;
            for (int i = k + 1; i < rows && !fixed; ++i)
                for (int j = k + 1; j < cols && !fixed; ++j)
                    if (m[i][j] % m[k][k] != 0) {
                        for (int jj = k; jj < cols; ++jj) m[k][jj] += m[i][jj];
                        fixed = true;
                    }
            if (!fixed) break;
        }
        if (m[k][k] < 0)
            for (int j = k; j < cols; ++j) m[k][j] = -m[k][j];
        diag.push_back(m[k][k]);
    }
    while (!diag.empty() && diag.back() == 0) diag.pop_back();
    return diag;
}

CohomologyReport cohomology_dense(const IntegerComplex& c) {
    std::map<int, std::vector<int>> by_degree;
    for (int i = 0; i < c.size(); ++i) by_degree[c.degree_of(i)].push_back(i);
    std::vector<int> pos(c.size());
    for (auto& [deg, ids] : by_degree)
        for (size_t p = 0; p < ids.size(); ++p) pos[ids[p]] = static_cast<int>(p);

    std::map<int, std::vector<std::vector<BigInt>>> mats;
    for (auto& [deg, ids] : by_degree) {
        size_t next = by_degree.count(deg + 1) ? by_degree[deg + 1].size() : 0;
        mats[deg].assign(next, std::vector<BigInt>(ids.size(), 0));
    }
    for (const Entry& e : c.differential().entries())
        mats[c.degree_of(e.col)][pos[e.row]][pos[e.col]] = e.val;

    std::map<int, std::vector<BigInt>> smith;
    for (auto& [deg, m] : mats) smith[deg] = dense_smith(m);

    auto rank_of = [&](int deg) -> int64_t {
        auto it = smith.find(deg);
        return it == smith.end() ? 0 : static_cast<int64_t>(it->second.size());
    };

    CohomologyReport report;
    for (auto& [deg, ids] : by_degree) {
        DegreeData data;
        data.rank = static_cast<int64_t>(ids.size()) - rank_of(deg) - rank_of(deg - 1);
        auto below = smith.find(deg - 1);
        if (below != smith.end())
            for (const BigInt& d : below->second)
                if (d > 1) data.torsion.push_back(d);
        report.set(deg, std::move(data));
    }
    return report;
}

} // namespace mmt::ref
