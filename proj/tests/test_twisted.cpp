#include <doctest.h>

#include "mmt/twisted.hpp"

using namespace mmt;

namespace {

bool is_z_in_degree_0(const CohomologyReport& rep) {
    return rep.nonzero().size() == 1 && rep.at(0) == DegreeData{1, {}};
}

} // namespace

TEST_CASE("representables and the star hom table") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    SUBCASE("evaluations of representables follow the face relation") {
        for (int s = 0; s < p3->size(); ++s) {
            auto ps = representable(p3, s);
            for (int t = 0; t < p3->size(); ++t) {
                auto rep = cohomology(evaluate(ps, t));
                if (p3->leq(s, t)) {
                    CHECK(is_z_in_degree_0(rep));
                } else {
                    CHECK(rep.is_zero());
                }
            }
        }
    }
    SUBCASE("hom between representables is one-directional") {
        const auto& k = p3->complex();
        int edge = *k.stratum_by_key("a|b");
        int vert = *k.stratum_by_key("b");
        auto pe = representable(p3, edge);
        auto pv = representable(p3, vert);
        CHECK(is_z_in_degree_0(cohomology(hom_complex(pe, pv).complex())));
        CHECK(cohomology(hom_complex(pv, pe).complex()).is_zero());
        CHECK(is_z_in_degree_0(cohomology(hom_complex(pe, pe).complex())));
    }
    SUBCASE("circle edge representable evaluates only on itself") {
        auto c3 = make_poset(standard_complex(StandardKind::circle, 3));
        int ab = *c3->complex().stratum_by_key("a|b");
        auto pab = representable(c3, ab);
        for (int t = 0; t < c3->size(); ++t) {
            CHECK(cohomology(evaluate(pab, t)).is_zero() == (t != ab));
        }
    }
}

TEST_CASE("composition of canonical generators") {
    auto tri = make_poset(standard_complex(StandardKind::simplex, 2));
    const auto& k = tri->complex();
    int v = *k.stratum_by_key("a");
    int e = *k.stratum_by_key("a|b");
    int f = *k.stratum_by_key("a|b|c");
    auto pv = representable(tri, v);
    auto pe = representable(tri, e);
    auto pf = representable(tri, f);
    // gamma_{f->e} . gamma_{e->v} hmm: maps P_f -> P_e -> P_v
    IntegerMatrix fe(1, 1, {{0, 0, 1}});
    IntegerMatrix ev(1, 1, {{0, 0, 1}});
    auto composite = compose_maps(fe, ev);
    CHECK(composite == IntegerMatrix(1, 1, {{0, 0, 1}}));
    CHECK(is_closed_degree0(pf, pv, composite));
    CHECK(compose_maps(identity_map(pf), fe) == fe);
    CHECK(compose_maps(fe, identity_map(pe)) == fe);
}

TEST_CASE("mapping cones of twisted complexes") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    int s = *p3->complex().stratum_by_key("b");
    auto ps = representable(p3, s);
    SUBCASE("cone of the identity is acyclic everywhere") {
        auto k = mapping_cone(ps, ps, identity_map(ps));
        for (int t = 0; t < p3->size(); ++t) CHECK(cohomology(evaluate(k, t)).is_zero());
        // and against hom from any representable
        for (int t = 0; t < p3->size(); ++t)
            CHECK(cohomology(hom_complex(representable(p3, t), k).complex()).is_zero());
    }
    SUBCASE("cone of zero splits as b + a[1]") {
        auto k = mapping_cone(ps, ps, IntegerMatrix(1, 1));
        CHECK(k.size() == 2);
        CHECK(k.gens()[0] == TwGen{s, 0});
        CHECK(k.gens()[1] == TwGen{s, -1});
        CHECK(k.diff().is_zero());
    }
    SUBCASE("non-closed maps are rejected") {
        auto pe = representable(p3, *p3->complex().stratum_by_key("a|b"));
        // degree mismatch: P_e -> P_b[1]
        CHECK_THROWS_AS(mapping_cone(pe, shift(ps, 1), IntegerMatrix(1, 1, {{0, 0, 1}})),
                        ValidationError);
    }
}

TEST_CASE("additive operations") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    int s = *p3->complex().stratum_by_key("b");
    auto ps = representable(p3, s);
    SUBCASE("shift by zero is the identity") {
        CHECK(shift(ps, 0) == ps);
        CHECK(shift(shift(ps, 3), -3) == ps);
    }
    SUBCASE("tensor by a single Z is the identity") {
        IntegerComplex unit({{"z", 0}}, IntegerMatrix(1, 1));
        CHECK(tensor_by_complex(ps, unit) == ps);
    }
    SUBCASE("tensor by Z --2--> Z leaves torsion in the evaluation") {
        IntegerComplex two({{"x", 0}, {"y", 1}}, IntegerMatrix(2, 2, {{1, 0, 2}}));
        auto t = tensor_by_complex(ps, two);
        CHECK(t.size() == 2);
        auto rep = cohomology(evaluate(t, s));
        CHECK(rep.at(1) == DegreeData{0, {BigInt(2)}});
        CHECK(rep.at(0) == DegreeData{});
    }
    SUBCASE("hom into a direct sum splits into exact blocks") {
        auto pe = representable(p3, *p3->complex().stratum_by_key("a|b"));
        auto pv = representable(p3, *p3->complex().stratum_by_key("a"));
        auto sum = direct_sum(pe, pv);
        auto ha = hom_complex(ps, pe);
        auto hb = hom_complex(ps, pv);
        auto hsum = hom_complex(ps, sum);
        REQUIRE(hsum.size() == ha.size() + hb.size());
        // no differential entry mixes the two summands
        for (const Entry& e : hsum.complex().differential().entries()) {
            bool row_in_b = hsum.basis()[e.row].second >= pe.size();
            bool col_in_b = hsum.basis()[e.col].second >= pe.size();
            CHECK(row_in_b == col_in_b);
        }
    }
}

TEST_CASE("verify_quasi_iso certificates") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    int s = *p3->complex().stratum_by_key("b");
    auto ps = representable(p3, s);
    CHECK(verify_quasi_iso(ps, ps, identity_map(ps)));
    CHECK_FALSE(verify_quasi_iso(ps, ps, IntegerMatrix(1, 1, {{0, 0, 2}})));
}

TEST_CASE("twisted differentials are nilpotent by degree") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    auto pe = representable(p3, *p3->complex().stratum_by_key("a|b"));
    auto pv = representable(p3, *p3->complex().stratum_by_key("b"));
    auto k = mapping_cone(pe, pv, IntegerMatrix(1, 1, {{0, 0, 1}}));
    int span = 0;
    for (const TwGen& g : k.gens()) span = std::max(span, std::abs(g.degree));
    IntegerMatrix power = IntegerMatrix::identity(k.size());
    for (int i = 0; i <= 2 * span + 1; ++i) power = power * k.diff();
    CHECK(power.is_zero());
}

TEST_CASE("gaussian reduction preserves every evaluation") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    auto pe = representable(p3, *p3->complex().stratum_by_key("a|b"));
    auto pv = representable(p3, *p3->complex().stratum_by_key("b"));
    auto k = mapping_cone(pe, pv, IntegerMatrix(1, 1, {{0, 0, 1}}));
    auto kk = mapping_cone(k, k, identity_map(k)); // definitely reducible
    auto reduced = gaussian_reduce(kk);
    CHECK(reduced.size() < kk.size());
    for (int t = 0; t < p3->size(); ++t)
        CHECK(cohomology(evaluate(reduced, t)) == cohomology(evaluate(kk, t)));
    for (int t = 0; t < p3->size(); ++t) {
        auto probe = representable(p3, t);
        CHECK(cohomology(hom_complex(probe, reduced).complex()) ==
              cohomology(hom_complex(probe, kk).complex()));
        CHECK(cohomology(hom_complex(reduced, probe).complex()) ==
              cohomology(hom_complex(kk, probe).complex()));
    }
    CHECK(gaussian_reduce(mapping_cone(pv, pv, identity_map(pv))).size() == 0);
}

TEST_CASE("gaussian reduction tracks the homotopy equivalence") {
    auto p3 = make_poset(standard_complex(StandardKind::path, 3));
    auto pe = representable(p3, *p3->complex().stratum_by_key("a|b"));
    auto pv = representable(p3, *p3->complex().stratum_by_key("b"));
    auto k = mapping_cone(pe, pv, IntegerMatrix(1, 1, {{0, 0, 1}}));
    auto kk = direct_sum(mapping_cone(k, k, identity_map(k)), k);
    IntegerMatrix p, i;
    auto reduced = gaussian_reduce(kk, &p, &i);
    CHECK(reduced.size() < kk.size());
    // projection and inclusion are closed degree-0 maps splitting the model
    CHECK(is_closed_degree0(kk, reduced, p));
    CHECK(is_closed_degree0(reduced, kk, i));
    CHECK(p * i == IntegerMatrix::identity(reduced.size()));
    CHECK(verify_quasi_iso(reduced, kk, i));
    CHECK(verify_quasi_iso(kk, reduced, p));
}
