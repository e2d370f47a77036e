#include "mmt/zchain.hpp"

#include <algorithm>
#include <map>

namespace mmt {

IntegerMatrix::IntegerMatrix(int rows, int cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols) {
    for (const Entry& e : entries) {
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
            throw ValidationError("matrix entry out of bounds");
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::pair(a.row, a.col) < std::pair(b.row, b.col);
    });
    entries_.reserve(entries.size());
    for (const Entry& e : entries) {
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
            entries_.back().val = add_ck(entries_.back().val, e.val);
            if (entries_.back().val == 0) entries_.pop_back();
        } else if (e.val != 0) {
            entries_.push_back(e);
        }
    }
}

IntegerMatrix IntegerMatrix::identity(int n) {
    std::vector<Entry> es;
    es.reserve(n);
    for (int i = 0; i < n; ++i) es.push_back({i, i, 1});
    return IntegerMatrix(n, n, std::move(es));
}

int64_t IntegerMatrix::at(int row, int col) const {
    Entry probe{row, col, 0};
    auto it = std::lower_bound(entries_.begin(), entries_.end(), probe,
                               [](const Entry& a, const Entry& b) {
                                   return std::pair(a.row, a.col) < std::pair(b.row, b.col);
                               });
    if (it != entries_.end() && it->row == row && it->col == col) return it->val;
    return 0;
}

IntegerMatrix IntegerMatrix::transpose() const {
    std::vector<Entry> es;
    es.reserve(entries_.size());
    for (const Entry& e : entries_) es.push_back({e.col, e.row, e.val});
    return IntegerMatrix(cols_, rows_, std::move(es));
}

IntegerMatrix IntegerMatrix::operator*(const IntegerMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw ValidationError("matrix shape mismatch in product");
    // group lhs entries by column for the walk over rhs entries
    std::vector<std::vector<Entry>> by_col(cols_);
    for (const Entry& e : entries_) by_col[e.col].push_back(e);
    std::map<std::pair<int, int>, int64_t> acc;
    for (const Entry& r : rhs.entries_) {
        for (const Entry& l : by_col[r.row]) {
            int64_t& slot = acc[{l.row, r.col}];
            slot = add_ck(slot, mul_ck(l.val, r.val));
        }
    }
    std::vector<Entry> es;
    es.reserve(acc.size());
    for (const auto& [rc, v] : acc)
        if (v != 0) es.push_back({rc.first, rc.second, v});
    return IntegerMatrix(rows_, rhs.cols_, std::move(es));
}

IntegerMatrix IntegerMatrix::operator+(const IntegerMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw ValidationError("matrix shape mismatch in sum");
    std::vector<Entry> es = entries_;
    es.insert(es.end(), rhs.entries_.begin(), rhs.entries_.end());
    return IntegerMatrix(rows_, cols_, std::move(es));
}

IntegerMatrix IntegerMatrix::operator-() const {
    return scaled(-1);
}

IntegerMatrix IntegerMatrix::scaled(int64_t c) const {
    std::vector<Entry> es = entries_;
    for (Entry& e : es) e.val = mul_ck(e.val, c);
    return IntegerMatrix(rows_, cols_, std::move(es));
}

IntegerComplex::IntegerComplex(std::vector<Generator> gens, IntegerMatrix differential)
    : generators_(std::move(gens)), differential_(std::move(differential)) {
    const int n = static_cast<int>(generators_.size());
    if (differential_.rows() != n || differential_.cols() != n)
        throw ValidationError("differential shape does not match generator count");
    for (const Entry& e : differential_.entries()) {
        if (generators_[e.row].degree != generators_[e.col].degree + 1)
            throw ValidationError("differential entry does not raise degree by 1");
    }
    if (!(differential_ * differential_).is_zero())
        throw ValidationError("differential does not square to zero");
}

IntegerComplex IntegerComplex::shifted(int k) const {
    std::vector<Generator> gens = generators_;
    for (Generator& g : gens) g.degree -= k;
    IntegerMatrix d = (k % 2 == 0) ? differential_ : -differential_;
    return IntegerComplex(std::move(gens), std::move(d));
}

void CohomologyReport::set(int degree, DegreeData data) {
    if (data.rank == 0 && data.torsion.empty()) {
        degrees_.erase(degree);
    } else {
        degrees_[degree] = std::move(data);
    }
}

DegreeData CohomologyReport::at(int degree) const {
    auto it = degrees_.find(degree);
    return it == degrees_.end() ? DegreeData{} : it->second;
}

int64_t CohomologyReport::total_rank() const {
    int64_t total = 0;
    for (const auto& [deg, data] : degrees_) total += data.rank;
    return total;
}

CohomologyReport cohomology(const IntegerComplex& c) {
    // indices per degree
    std::map<int, std::vector<int>> by_degree;
    for (int i = 0; i < c.size(); ++i) by_degree[c.degree_of(i)].push_back(i);
    std::vector<int> index_in_degree(c.size());
    for (auto& [deg, ids] : by_degree)
        for (size_t pos = 0; pos < ids.size(); ++pos) index_in_degree[ids[pos]] = static_cast<int>(pos);

    // d_n : degree n -> degree n+1, one sparse matrix per adjacent pair
    std::map<int, std::vector<Entry>> mats;
    for (const Entry& e : c.differential().entries()) {
        int n = c.degree_of(e.col);
        mats[n].push_back({index_in_degree[e.row], index_in_degree[e.col], e.val});
    }

    std::vector<int> degs;
    for (const auto& [deg, ids] : by_degree) degs.push_back(deg);

    std::map<int, SmithResult> snf_of_d; // keyed by source degree n
    std::vector<int> mat_degs;
    for (const auto& [n, es] : mats) mat_degs.push_back(n);
    std::vector<SmithResult> results(mat_degs.size());
#pragma omp parallel for schedule(dynamic)
    for (size_t k = 0; k < mat_degs.size(); ++k) {
        int n = mat_degs[k];
        int nrows = by_degree.count(n + 1) ? static_cast<int>(by_degree[n + 1].size()) : 0;
        int ncols = static_cast<int>(by_degree[n].size());
        results[k] = smith_normal_form(IntegerMatrix(nrows, ncols, mats[n]));
    }
    for (size_t k = 0; k < mat_degs.size(); ++k) snf_of_d[mat_degs[k]] = std::move(results[k]);

    auto rank_d = [&](int n) -> int64_t {
        auto it = snf_of_d.find(n);
        return it == snf_of_d.end() ? 0 : it->second.rank();
    };

    CohomologyReport report;
    for (int n : degs) {
        DegreeData data;
        data.rank = static_cast<int64_t>(by_degree[n].size()) - rank_d(n) - rank_d(n - 1);
        auto below = snf_of_d.find(n - 1);
        if (below != snf_of_d.end()) {
            for (const BigInt& d : below->second.invariants)
                if (d > 1) data.torsion.push_back(d);
        }
        report.set(n, std::move(data));
    }
    return report;
}

std::vector<CohomologyReport> cohomology_many(std::span<const IntegerComplex> cs) {
    std::vector<CohomologyReport> out(cs.size());
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < cs.size(); ++i) out[i] = cohomology(cs[i]);
    return out;
}

bool is_chain_map(const ChainMap& f) {
    if (f.source == nullptr || f.target == nullptr) return false;
    if (f.matrix.rows() != f.target->size() || f.matrix.cols() != f.source->size()) return false;
    for (const Entry& e : f.matrix.entries()) {
        if (f.target->degree_of(e.row) != f.source->degree_of(e.col)) return false;
    }
    return f.target->differential() * f.matrix == f.matrix * f.source->differential();
}

IntegerComplex cone(const ChainMap& f) {
    if (!is_chain_map(f)) throw ValidationError("cone requires a chain map");
    const IntegerComplex& a = *f.source;
    const IntegerComplex& b = *f.target;
    std::vector<Generator> gens = b.generators();
    gens.reserve(b.size() + a.size());
    for (const Generator& g : a.generators()) gens.push_back({g.label, g.degree - 1});

    std::vector<Entry> es;
    for (const Entry& e : b.differential().entries()) es.push_back(e);
    for (const Entry& e : f.matrix.entries()) es.push_back({e.row, b.size() + e.col, e.val});
    for (const Entry& e : a.differential().entries())
        es.push_back({b.size() + e.row, b.size() + e.col, -e.val});
    return IntegerComplex(std::move(gens), IntegerMatrix(b.size() + a.size(), b.size() + a.size(), std::move(es)));
}

bool is_quasi_iso(const ChainMap& f) {
    return cohomology(cone(f)).is_zero();
}

int64_t euler_characteristic(const IntegerComplex& c) {
    int64_t chi = 0;
    for (const Generator& g : c.generators()) chi += (g.degree % 2 == 0) ? 1 : -1;
    return chi;
}

} // namespace mmt
