#pragma once

// The sheaf layer: constructible modules over the face poset, indicator
// objects and their order-complex resolutions, sections over constructible
// opens, stalks, microstalks computed as cones across sublevel-set
// crossings, refinement functors, and microsupport reports on triangulated
// 1-manifolds.

#include <optional>
#include <utility>
#include <vector>

#include "mmt/facets.hpp"
#include "mmt/twisted.hpp"
#include "mmt/zchain.hpp"

namespace mmt {

// Strict functor on the face poset: a complex M(s) per stratum and a chain
// map M(s) -> M(t) per covering relation s < t (restriction from star(s) to
// the smaller star(t)); composites along any two chains agree exactly.
class PosetModule {
public:
    PosetModule(PosetPtr poset, std::vector<IntegerComplex> values,
                std::vector<std::pair<std::pair<int, int>, IntegerMatrix>> cover_maps);

    static PosetModule constant(const PosetPtr& poset);
    static PosetModule indicator(const ConstructibleOpen& u);
    static PosetModule skyscraper(const PosetPtr& poset, int vertex_stratum);
    // rank-1 local system on a circle; the incidence from the first vertex
    // in the canonical order into its inward edge carries the monodromy
    static PosetModule local_system(const Manifold1D& m, int64_t monodromy);

    const PosetPtr& poset() const { return poset_; }
    const IntegerComplex& value(int s) const { return values_[s]; }
    const IntegerMatrix& cover_map(int s, int t) const; // s < t covering
    IntegerMatrix map_for(int s, int t) const;          // any s <= t, by composition

private:
    PosetPtr poset_;
    std::vector<IntegerComplex> values_;
    std::vector<std::vector<std::pair<int, IntegerMatrix>>> covers_; // covers_[s]: (t, map)
};

// Order-complex resolution of an indicator object: one generator per
// strictly increasing chain of strata inside U, carried by the chain's top
// in degree -(length); quasi-isomorphic to 1_U.
struct IndicatorResolution {
    TwistedComplex complex;
    std::vector<std::vector<int>> chains; // aligned with complex.gens()
    int chain_index(const std::vector<int>& chain) const;
};

IndicatorResolution indicator_resolution(const ConstructibleOpen& u);

// Generator-wise inclusion of chains (U inside V); closed of degree 0 and
// strictly functorial in the inclusion.
IntegerMatrix canonical_inclusion(const IndicatorResolution& from_u, const IndicatorResolution& to_v);

// The augmentation res(star(s)) -> P_s sending every length-0 chain (b) to
// the canonical morphism P_b -> P_s.
IntegerMatrix augmentation_to_representable(const IndicatorResolution& res_star, int s,
                                            const TwistedComplex& p_s);

CohomologyReport sections(const ConstructibleOpen& u, const TwistedComplex& f);
CohomologyReport stalk(int t, const TwistedComplex& f);

// Combinatorial shadow of Morse-function data: nested constructible opens
// U inside V, with the conormal point the sweep is aimed at (1d), or a
// free-text user assertion in higher dimension.
struct Casting {
    ConstructibleOpen u;
    ConstructibleOpen v;
    std::optional<ConormalPoint> target;
    std::string assertion;

    Casting(ConstructibleOpen u_, ConstructibleOpen v_, std::optional<ConormalPoint> target_ = {},
            std::string assertion_ = {});
};

// cone(1_U -> 1_V) over the canonical inclusion of resolutions
TwistedComplex casting_cone(const Casting& c);

// H^* hom(cone(1_U -> 1_V), F), raw cone grading (no index shift applied)
CohomologyReport microstalk(const Casting& c, const TwistedComplex& f);

// Two-sided bar resolution of a strict module by representables; for every
// t, evaluate(resolve_module(M), t) is quasi-isomorphic to M(t).
TwistedComplex resolve_module(const PosetModule& m);

// Extension of scalars along a refinement map: generator-wise relabeling of
// carriers; representables map to representables.
TwistedComplex refinement_pushforward(const RefinementMap& r, const TwistedComplex& a);

// Restriction of scalars: the module s' -> evaluate(f, r(s')), resolved.
TwistedComplex pullback_object(const RefinementMap& r, const TwistedComplex& f);

struct ComparisonMap {
    TwistedComplex source; // pushforward of the resolution of the pulled-back open
    TwistedComplex target; // resolution of U over the coarse poset
    IntegerMatrix map;     // chain -> its image chain when strictly increasing, else 0
};

ComparisonMap comparison_map(const RefinementMap& r, const ConstructibleOpen& u);

// The minimal sublevel-set sweep crossing `vertex` in direction `sign`:
// entry and exit at the neighboring vertices (or off a path end).
Casting minimal_casting(const Manifold1D& m, int vertex, Sign sign);

// Conormal directions at which some microstalk of f fails to vanish,
// computed through the canonical minimal castings on a double subdivision.
std::vector<ConormalPoint> microsupport_1d(const Manifold1D& m, const TwistedComplex& f);

// True iff every restriction map evaluate(f, s) -> evaluate(f, t) for
// s <= t is a quasi-isomorphism.
bool is_locally_constant(const TwistedComplex& f);

} // namespace mmt
