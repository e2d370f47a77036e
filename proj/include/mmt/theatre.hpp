#pragma once

// Morse characters and the quotient categories they define.  The quotient
// hom spaces are computed from a level-truncated bar model of the Drinfeld
// quotient: words through the killed characters with shifted connecting
// homs, differential = internal differentials plus composition of adjacent
// factors.  Truncation level = word length; every answer is tagged with it.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "mmt/microsheaf.hpp"

namespace mmt {

// The conormal points kept as the stop.
struct StopSpec1D {
    std::vector<ConormalPoint> points; // sorted by (vertex, sign)

    bool contains(ConormalPoint p) const;
};

StopSpec1D make_stop_spec(const Manifold1D& m, std::vector<ConormalPoint> points);

struct MorseCharacter {
    Casting casting;       // provenance
    TwistedComplex cone;   // cone(1_U -> 1_V) on the nose
    TwistedComplex model;  // homotopy-equivalent reduced form used in bar words

    std::optional<ConormalPoint> point() const { return casting.target; }
};

MorseCharacter morse_character(const Casting& c);

// Combinatorial sweep validity: V minus U is one interval swept in the
// target's direction across the target vertex, and no other vertex interior
// to the sweep meets the kept stop in the swept direction.
bool validate_casting_1d(const Manifold1D& m, const Casting& c, const StopSpec1D& lambda);

struct ResourceLimits {
    int64_t bar_generators = 500000;
    int64_t twisted_generators = 10000;
};

class QuotientContext {
public:
    QuotientContext(PosetPtr poset, std::vector<MorseCharacter> characters,
                    std::optional<Manifold1D> manifold = {}, StopSpec1D lambda = {},
                    ResourceLimits limits = {});

    const PosetPtr& poset() const { return poset_; }
    const std::vector<MorseCharacter>& characters() const { return characters_; }
    const std::optional<Manifold1D>& manifold() const { return manifold_; }
    const StopSpec1D& lambda() const { return lambda_; }
    const ResourceLimits& limits() const { return limits_; }
    // cached hom between reduced character models
    const HomComplexWithBasis& hom_xx(int i, int j) const;

private:
    PosetPtr poset_;
    std::vector<MorseCharacter> characters_;
    std::optional<Manifold1D> manifold_;
    StopSpec1D lambda_;
    ResourceLimits limits_;
    std::vector<HomComplexWithBasis> hom_cache_; // row-major m x m, filled eagerly
};

// Subdivides twice, then casts the minimal character at every conormal
// point of the refined manifold not kept in lambda.
QuotientContext auto_cast_1d(const Manifold1D& k, const StopSpec1D& lambda,
                             ResourceLimits limits = {});

// The level-truncated quotient complex with its word bookkeeping.
class BarComplex {
public:
    struct Word {
        std::vector<int> letters; // character indices, innermost first
        int offset = 0;           // first generator index
        std::vector<const HomComplexWithBasis*> factors; // size letters.size() + 1
        std::vector<int> strides; // factor 0 fastest
        int block = 0;            // total generators of this word
    };

    const IntegerComplex& complex() const { return complex_; }
    int level() const { return level_; }
    const std::vector<Word>& words() const { return words_; }
    int word_index(const std::vector<int>& letters) const; // -1 if absent
    int gen_index(int word, const std::vector<int>& tuple) const;
    std::vector<int> indices_in_degree(int degree) const;
    // coefficient vector of the length-0 word of a map matrix (a -> b);
    // requires the k = 0 factor hom(a, b)
    std::vector<int64_t> length_zero_vector(const IntegerMatrix& f) const;

private:
    friend BarComplex build_bar(const QuotientContext&, const TwistedComplex&,
                                const TwistedComplex&, int);
    IntegerComplex complex_;
    std::vector<Word> words_;
    std::map<std::vector<int>, int> word_of_;
    int level_ = 0;
    // hom complexes owned by this bar (a- and b-sided); character-character
    // factors point into the context cache
    std::vector<std::unique_ptr<HomComplexWithBasis>> owned_;
};

BarComplex build_bar(const QuotientContext& ctx, const TwistedComplex& a, const TwistedComplex& b,
                     int level);

// H^* of the level-truncated quotient complex of morphisms a -> b.
CohomologyReport quotient_hom(const QuotientContext& ctx, const TwistedComplex& a,
                              const TwistedComplex& b, int level);

// hom(X_i, b) acyclic for every character: b already lives in the quotient.
bool is_right_orthogonal(const QuotientContext& ctx, const TwistedComplex& b);

struct TowerResult {
    TwistedComplex replacement;
    bool stabilized = false;
    int iterations = 0;
};

// Iterates b <- cone((+)_i X_i (x) hom(X_i, b) -> b) until every hom from a
// character is acyclic (the right-orthogonal) or the iteration budget runs
// out.  When it stabilizes, hom(a, replacement) computes the exact quotient
// morphism space for every a.
TowerResult tower_replacement(const QuotientContext& ctx, const TwistedComplex& b, int max_iter);

struct PeelReport {
    std::vector<CohomologyReport> multiplicities; // aligned with the collection
    TwistedComplex residual;
    bool generated = false;
    int steps = 0;
};

// Exceptional-collection peeling: repeatedly evaluates against a maximal
// object and cones off its contribution; generated means the residual
// tests trivially against the whole collection.
PeelReport peel(const std::vector<TwistedComplex>& collection, const TwistedComplex& m,
                ResourceLimits limits = {});

enum class Independence { isomorphic_at_level, indeterminate };

struct IndependenceResult {
    Independence verdict = Independence::indeterminate;
    int level = 0;
};

// Searches for inverse morphism classes between two characters at the same
// declared point inside the level-N quotient complexes; never reports a
// negative.
IndependenceResult casting_independence(const QuotientContext& ctx, const MorseCharacter& x1,
                                        const MorseCharacter& x2, int level);

// Extends the context's character list with the points dropped from its
// stop: identity on objects, same bar filtration, more characters.
QuotientContext stop_removal(const QuotientContext& ctx, const StopSpec1D& smaller);

} // namespace mmt
