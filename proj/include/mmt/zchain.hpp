#pragma once

// Exact linear algebra and homological primitives over the integers.
// Everything downstream (poset modules, twisted complexes, quotient
// categories) reduces its questions to this kernel.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmt/errors.hpp"

namespace mmt {

using BigInt = boost::multiprecision::cpp_int;

inline int64_t add_ck(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError();
    return r;
}

inline int64_t mul_ck(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError();
    return r;
}

struct Entry {
    int32_t row = 0;
    int32_t col = 0;
    int64_t val = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

// Sparse integer matrix.  Entries are kept sorted row-major by (row, col),
// with no duplicates and no explicit zeros, so equal matrices compare equal
// and emitted files are bit-stable.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}
    // Canonicalizes: sorts, sums duplicate keys, drops zeros.
    IntegerMatrix(int rows, int cols, std::vector<Entry> entries);

    static IntegerMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<Entry>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }
    int64_t at(int row, int col) const;

    IntegerMatrix transpose() const;
    IntegerMatrix operator*(const IntegerMatrix& rhs) const;
    IntegerMatrix operator+(const IntegerMatrix& rhs) const;
    IntegerMatrix operator-() const;
    IntegerMatrix scaled(int64_t c) const;
    friend bool operator==(const IntegerMatrix&, const IntegerMatrix&) = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Entry> entries_;
};

struct SmithResult {
    // Invariant factors d_1 | d_2 | ..., all positive; ones first.
    std::vector<BigInt> invariants;

    int rank() const { return static_cast<int>(invariants.size()); }
};

SmithResult smith_normal_form(const IntegerMatrix& a);
int matrix_rank(const IntegerMatrix& a);

// One solution x of a*x = b over the integers, if any exists.
std::optional<std::vector<BigInt>> solve_z(const IntegerMatrix& a, const std::vector<BigInt>& b);

struct Generator {
    std::string label; // may be empty for machine-generated bases
    int degree = 0;

    friend bool operator==(const Generator&, const Generator&) = default;
};

// Finitely generated complex of free abelian groups with differential of
// degree +1 (cohomological convention).  differential entry (i, j) is the
// coefficient of generator i in d(generator j).
class IntegerComplex {
public:
    IntegerComplex() = default;
    IntegerComplex(std::vector<Generator> gens, IntegerMatrix differential);

    static IntegerComplex zero() { return IntegerComplex(); }

    int size() const { return static_cast<int>(generators_.size()); }
    const std::vector<Generator>& generators() const { return generators_; }
    int degree_of(int i) const { return generators_[i].degree; }
    const IntegerMatrix& differential() const { return differential_; }

    IntegerComplex shifted(int k) const; // C[k]: degrees drop by k, d flips sign for odd k
    friend bool operator==(const IntegerComplex&, const IntegerComplex&) = default;

private:
    std::vector<Generator> generators_;
    IntegerMatrix differential_;
};

struct DegreeData {
    int64_t rank = 0;
    std::vector<BigInt> torsion; // d_1 | d_2 | ..., each >= 2

    friend bool operator==(const DegreeData&, const DegreeData&) = default;
};

// Per-degree free rank and torsion invariants; degrees not present are zero.
class CohomologyReport {
public:
    void set(int degree, DegreeData data);
    DegreeData at(int degree) const;
    const std::map<int, DegreeData>& nonzero() const { return degrees_; }
    bool is_zero() const { return degrees_.empty(); }
    int64_t total_rank() const;
    friend bool operator==(const CohomologyReport&, const CohomologyReport&) = default;

private:
    std::map<int, DegreeData> degrees_;
};

CohomologyReport cohomology(const IntegerComplex& c);

// OpenMP-parallel batch; results are index-aligned with the input and
// identical to calling cohomology() serially on each element.
std::vector<CohomologyReport> cohomology_many(std::span<const IntegerComplex> cs);

struct ChainMap {
    // matrix entry (i, j): coefficient of target generator i in f(source generator j)
    const IntegerComplex* source = nullptr;
    const IntegerComplex* target = nullptr;
    IntegerMatrix matrix;
};

bool is_chain_map(const ChainMap& f);

// cone(f: A -> B) = B (+) A[1] with differential [[d_B, f], [0, -d_A]].
IntegerComplex cone(const ChainMap& f);

bool is_quasi_iso(const ChainMap& f);

int64_t euler_characteristic(const IntegerComplex& c);

} // namespace mmt
