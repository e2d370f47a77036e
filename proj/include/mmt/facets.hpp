#pragma once

// Finite simplicial complexes, their face posets and star calculus,
// constructible open sets, refinement maps, and triangulated 1-manifolds.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmt/errors.hpp"

namespace mmt {

// Abstract simplicial complex with string-labeled vertices.  Strata are the
// simplices, indexed in a canonical order: by dimension, then by the sorted
// vertex-id list.  Stratum keys (sorted vertex labels joined by "|") are the
// stable external names.
class SimplicialComplex {
public:
    SimplicialComplex(std::vector<std::string> vertex_labels,
                      std::vector<std::vector<std::string>> simplices);

    int vertex_count() const { return static_cast<int>(vertex_labels_.size()); }
    int stratum_count() const { return static_cast<int>(strata_.size()); }
    const std::vector<std::string>& vertex_labels() const { return vertex_labels_; }
    // vertex ids of stratum s, sorted
    const std::vector<int>& stratum(int s) const { return strata_[s]; }
    int dim(int s) const { return static_cast<int>(strata_[s].size()) - 1; }
    std::string stratum_key(int s) const;
    std::optional<int> stratum_by_vertices(std::vector<int> verts) const;
    std::optional<int> stratum_by_key(const std::string& key) const;
    std::optional<int> vertex_id(const std::string& label) const;
    int vertex_stratum(int vertex) const; // stratum index of a singleton

    friend bool operator==(const SimplicialComplex&, const SimplicialComplex&) = default;

private:
    std::vector<std::string> vertex_labels_;      // sorted
    std::vector<std::vector<int>> strata_;        // canonical order
};

// Face relation s <= t, meaning s is a face of t (the star topology reverses
// this: star(t) is contained in star(s)).
class FacePoset {
public:
    explicit FacePoset(SimplicialComplex complex);

    const SimplicialComplex& complex() const { return complex_; }
    int size() const { return complex_.stratum_count(); }
    bool leq(int s, int t) const;                    // s is a face of t
    const std::vector<int>& star(int s) const { return stars_[s]; }
    const std::vector<int>& faces(int t) const { return faces_[t]; } // closure
    const std::vector<int>& cofacets(int s) const { return cofacets_[s]; } // covering relations upward
    std::vector<int> maximal_strata() const;

private:
    SimplicialComplex complex_;
    std::vector<std::vector<int>> stars_;    // sorted
    std::vector<std::vector<int>> faces_;    // sorted
    std::vector<std::vector<int>> cofacets_; // sorted, codimension 1 only
};

using PosetPtr = std::shared_ptr<const FacePoset>;

PosetPtr make_poset(SimplicialComplex complex);

// Up-closed set of strata (the combinatorial form of an S-constructible
// open subset).
class ConstructibleOpen {
public:
    ConstructibleOpen() = default;
    ConstructibleOpen(PosetPtr poset, std::vector<int> strata); // validates up-closure

    static ConstructibleOpen star_of(const PosetPtr& poset, int s);
    static ConstructibleOpen whole(const PosetPtr& poset);
    static ConstructibleOpen empty(const PosetPtr& poset);

    const PosetPtr& poset() const { return poset_; }
    const std::vector<int>& strata() const { return strata_; } // sorted
    bool contains(int s) const;
    bool subset_of(const ConstructibleOpen& other) const;
    ConstructibleOpen intersect(const ConstructibleOpen& other) const;

private:
    PosetPtr poset_;
    std::vector<int> strata_;
};

bool is_up_closed(const FacePoset& poset, const std::vector<int>& strata);

// Monotone surjection S' -> S induced by a refinement of stratifications;
// always user-supplied (or produced by subdivide_1d) and validated.
struct RefinementMap {
    PosetPtr source; // S', the finer poset
    PosetPtr target; // S
    std::vector<int> image; // stratum of S containing each stratum of S'
};

void validate_refinement(const RefinementMap& r); // throws ValidationError
ConstructibleOpen pullback_open(const RefinementMap& r, const ConstructibleOpen& u);
RefinementMap compose(const RefinementMap& second, const RefinementMap& first);

enum class StandardKind { path, circle, simplex, sphere_boundary };

SimplicialComplex standard_complex(StandardKind kind, int n);

enum class Sign : int8_t { plus = +1, minus = -1 };

inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }
inline Sign opposite(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

// One of the two conormal directions at a vertex of a triangulated
// 1-manifold; + points along the manifold's canonical vertex order.
struct ConormalPoint {
    int vertex = -1; // vertex id in the ambient complex
    Sign sign = Sign::plus;

    friend auto operator<=>(const ConormalPoint&, const ConormalPoint&) = default;
};

// A triangulated 1-manifold together with its canonical vertex order (the
// orientation used to name conormal directions).  Paths list the vertices
// end to end; circles list one full cycle.
class Manifold1D {
public:
    Manifold1D(PosetPtr poset, std::vector<int> vertex_order, bool circle);

    // Derives the canonical order from the complex: walk from the
    // lexicographically smallest end (path) or vertex (circle), toward its
    // lexicographically smaller neighbor.
    static Manifold1D from_complex(PosetPtr poset);

    const PosetPtr& poset() const { return poset_; }
    const SimplicialComplex& complex() const { return poset_->complex(); }
    bool is_circle() const { return circle_; }
    int vertex_count() const { return static_cast<int>(order_.size()); }
    const std::vector<int>& vertex_order() const { return order_; }
    int position_of(int vertex) const;

    // neighbors along the order; nullopt past a path end
    std::optional<int> next_vertex(int vertex) const;
    std::optional<int> prev_vertex(int vertex) const;
    int edge_between(int u, int v) const; // stratum id

    // Strata in manifold order: v0, e01, v1, e12, ... (circles wrap).
    std::vector<int> strata_in_order() const;

private:
    PosetPtr poset_;
    std::vector<int> order_;
    bool circle_ = false;
};

// The conormal directions the theatre sees: both signs at every vertex of a
// circle; on a path the two end vertices carry only the inward direction
// (the ends model open ends, so the outward covectors are never stopped or
// probed).
std::vector<ConormalPoint> conormal_points(const Manifold1D& m);
bool is_conormal_point(const Manifold1D& m, ConormalPoint p);

struct Subdivision {
    Manifold1D refined;
    RefinementMap map; // refined -> original
};

// Barycentric subdivision in dimension 1: one new vertex per edge.  The
// refinement map sends new vertices and half-edges to the original edge and
// old vertices to themselves.
Subdivision subdivide_1d(const Manifold1D& m);

} // namespace mmt
