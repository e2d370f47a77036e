#pragma once

// Twisted complexes over the linearized face poset: formal sums of shifted
// representables P_s = 1_{star(s)} with a square-zero degree-1 integer
// differential.  For t <= s there is exactly one canonical generator
// P_s -> P_t and Hom(P_s, P_t) = 0 otherwise, so differentials, Hom
// complexes and compositions are plain integer matrices.

#include <utility>
#include <vector>

#include "mmt/facets.hpp"
#include "mmt/zchain.hpp"

namespace mmt {

struct TwGen {
    int stratum = 0; // carrier
    int degree = 0;

    friend bool operator==(const TwGen&, const TwGen&) = default;
};

class TwistedComplex {
public:
    TwistedComplex() = default;
    // Validates carrier/degree constraints and D*D = 0.
    TwistedComplex(PosetPtr poset, std::vector<TwGen> gens, IntegerMatrix diff);

    static TwistedComplex zero(PosetPtr poset);

    const PosetPtr& poset() const { return poset_; }
    int size() const { return static_cast<int>(gens_.size()); }
    const std::vector<TwGen>& gens() const { return gens_; }
    const IntegerMatrix& diff() const { return diff_; }

    friend bool operator==(const TwistedComplex&, const TwistedComplex&) = default;

private:
    PosetPtr poset_;
    std::vector<TwGen> gens_;
    IntegerMatrix diff_;
};

TwistedComplex representable(const PosetPtr& poset, int s);
TwistedComplex shift(const TwistedComplex& a, int k);
TwistedComplex direct_sum(const TwistedComplex& a, const TwistedComplex& b);
// a (x) c: generators (i, g) in lexicographic order, differential
// D_a (x) 1 + (-1)^{deg_a} 1 (x) d_c.
TwistedComplex tensor_by_complex(const TwistedComplex& a, const IntegerComplex& c);

// Hom(a, b) as an integer complex with its labeled basis: pairs (i, j) of a
// generator i of a and j of b whose carriers admit the canonical morphism
// (carrier_b(j) <= carrier_a(i)), placed in degree deg_b(j) - deg_a(i).
class HomComplexWithBasis {
public:
    HomComplexWithBasis() = default;
    HomComplexWithBasis(IntegerComplex complex, std::vector<std::pair<int, int>> basis);

    const IntegerComplex& complex() const { return complex_; }
    const std::vector<std::pair<int, int>>& basis() const { return basis_; }
    int size() const { return complex_.size(); }
    int index_of(int i, int j) const; // -1 if the pair is not a basis element

private:
    IntegerComplex complex_;
    std::vector<std::pair<int, int>> basis_; // sorted
};

HomComplexWithBasis hom_complex(const TwistedComplex& a, const TwistedComplex& b);

// Maps a -> b are integer matrices with entry (j, i) the coefficient on the
// canonical morphism from a's generator i to b's generator j.
bool is_valid_map(const TwistedComplex& a, const TwistedComplex& b, const IntegerMatrix& f,
                  int degree);
bool is_closed_degree0(const TwistedComplex& a, const TwistedComplex& b, const IntegerMatrix& f);

IntegerMatrix identity_map(const TwistedComplex& a);
// g after f, as matrices
IntegerMatrix compose_maps(const IntegerMatrix& f, const IntegerMatrix& g);

// Conversions between map matrices and coefficient vectors in the hom basis.
std::vector<int64_t> to_hom_vector(const HomComplexWithBasis& hom, const IntegerMatrix& f);
IntegerMatrix from_hom_vector(const TwistedComplex& a, const TwistedComplex& b,
                              const HomComplexWithBasis& hom, const std::vector<int64_t>& v);

TwistedComplex mapping_cone(const TwistedComplex& a, const TwistedComplex& b,
                            const IntegerMatrix& f);

// Hom(P_t, a) realized directly as the subcomplex of generators whose
// carrier is a face of t.
IntegerComplex evaluate(const TwistedComplex& a, int t);
// also reports which generator of a each evaluation generator came from
IntegerComplex evaluate(const TwistedComplex& a, int t, std::vector<int>* gen_ids);

// True iff every evaluation of cone(f) is acyclic; evaluations jointly
// detect quasi-isomorphism since they are the homs from representables.
bool verify_quasi_iso(const TwistedComplex& a, const TwistedComplex& b, const IntegerMatrix& f);

// Homotopy-equivalent smaller model: repeatedly cancels +-1 differential
// entries between generators with the same carrier.  Optionally reports the
// projection reduced <- a and inclusion a <- reduced chain maps of the
// homotopy equivalence.
TwistedComplex gaussian_reduce(const TwistedComplex& a, IntegerMatrix* projection = nullptr,
                               IntegerMatrix* inclusion = nullptr);

} // namespace mmt
