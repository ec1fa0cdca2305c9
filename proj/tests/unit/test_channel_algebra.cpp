/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The jtsched Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <doctest.h>

#include <random>

#include "jtsched/channel_algebra.hpp"
#include "jtsched/errors.hpp"
#include "test_support.hpp"

using namespace jtsched;

namespace {

// Power iteration on H H^H; independent of the library's SVD paths.
double top_singular_value(const CMatrix& h) {
    CVector x = CVector::Ones(h.rows());
    double mu = 0.0;
    for (int it = 0; it < 5000; ++it) {
        CVector y = h * (h.adjoint() * x);
        const double n = y.norm();
        if (n == 0.0) return 0.0;
        x = y / n;
        mu = n;
    }
    return std::sqrt(mu);
}

}  // namespace

TEST_CASE("dominant triplet satisfies u^H H = lambda v^H for both backends") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int nr = 1 + trial % 4;
        const int nt = 4 + trial % 13;
        const CMatrix h = testing::gaussian(rng, nr, nt);
        for (SvdBackend b : {SvdBackend::Jacobi, SvdBackend::Gram}) {
            const SingularTriplet t = dominant_triplet(h, {0}, b);
            const CRowVector lhs = t.u.adjoint() * h;
            const CRowVector rhs = t.lambda * t.v_sub[0].adjoint();
            CHECK((lhs - rhs).norm() < 1e-9 * (1.0 + t.lambda));
            CHECK(t.u.norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(t.v_sub[0].norm() == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(t.schedulable);
            CHECK(t.frobenius == doctest::Approx(h.norm()));
        }
    }
}

TEST_CASE("lambda is the largest singular value") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix h = testing::gaussian(rng, 2, 16);
        const SingularTriplet t = dominant_triplet(h, {0});
        CHECK(t.lambda == doctest::Approx(top_singular_value(h)).epsilon(1e-8));
    }
}

TEST_CASE("backends agree after phase normalization") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const CMatrix h = testing::gaussian(rng, 3, 8);
        const SingularTriplet a = dominant_triplet(h, {0}, SvdBackend::Jacobi);
        const SingularTriplet b = dominant_triplet(h, {0}, SvdBackend::Gram);
        CHECK(a.lambda == doctest::Approx(b.lambda).epsilon(1e-10));
        CHECK((a.u - b.u).norm() < 1e-8);
        CHECK((a.v_sub[0] - b.v_sub[0]).norm() < 1e-8);
        Eigen::Index pivot;
        a.u.cwiseAbs().maxCoeff(&pivot);
        CHECK(a.u(pivot).imag() == 0.0);
        CHECK(a.u(pivot).real() > 0.0);
    }
}

TEST_CASE("JT stacking splits v into unit-total slices") {
    std::mt19937_64 rng(5);
    const CMatrix h0 = testing::gaussian(rng, 2, 8);
    const CMatrix h2 = testing::gaussian(rng, 2, 8);
    CMatrix stacked(2, 16);
    stacked << h0, h2;
    const SingularTriplet t = dominant_triplet(stacked, {0, 2});
    REQUIRE(t.v_sub.size() == 2);
    CHECK(t.v_for(0).size() == 8);
    CHECK(t.v_for(0).squaredNorm() + t.v_for(2).squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(t.has_cell(2));
    CHECK_FALSE(t.has_cell(1));
    CHECK_THROWS_AS(t.v_for(1), DomainError);
    const CRowVector lhs0 = t.u.adjoint() * h0;
    CHECK((lhs0 - equivalent_channel(t, 0)).norm() < 1e-9);
}

TEST_CASE("stacked_channel places blocks in serving order") {
    testing::ManualSpec spec;
    spec.cells = 2;
    spec.nt = 3;
    spec.nr = 2;
    spec.serving = {{0, 1}};
    auto [s, ch] = testing::manual_scenario(spec);
    const CMatrix h = stacked_channel(ch, s.ues[0], 0, 0);
    CHECK(h.cols() == 6);
    CHECK(h.leftCols(3) == ch.at(0, 0, 0, 0));
    CHECK(h.rightCols(3) == ch.at(1, 0, 0, 0));
}

TEST_CASE("zero channels are flagged") {
    const SingularTriplet t = dominant_triplet(CMatrix::Zero(2, 4), {0});
    CHECK_FALSE(t.schedulable);
    CHECK(t.lambda == 0.0);

    testing::ManualSpec spec;
    spec.serving = {{0}, {0}};
    auto [s, ch] = testing::manual_scenario(spec);
    ch.at(0, 1, 0, 0).setZero();
    try {
        svd_cache(ch, s);
        FAIL("expected DegenerateChannelError");
    } catch (const DegenerateChannelError& e) {
        CHECK(e.ue == 1);
        CHECK(std::string(e.kind()) == "degenerate_channel");
    }
}

TEST_CASE("direction correlation bounds") {
    CVector a(3), b(3), z = CVector::Zero(3);
    a << cdouble(1, 0), cdouble(0, 1), cdouble(0, 0);
    b << cdouble(0, 0), cdouble(0, 0), cdouble(2, 0);
    CHECK(direction_correlation(a, a * cdouble(0, 3)) == doctest::Approx(1.0));
    CHECK(direction_correlation(a, b) == 0.0);
    CHECK(direction_correlation(a, z) == 0.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const CVector x = testing::gaussian(rng, 6, 1);
        const CVector y = testing::gaussian(rng, 6, 1);
        const double eta = direction_correlation(x, y);
        CHECK(eta >= 0.0);
        CHECK(eta <= 1.0);
        CHECK(eta == doctest::Approx(direction_correlation(y, x)).epsilon(1e-12));
    }
}

TEST_CASE("svd cache covers every UE and RBG") {
    auto inst = make_instance(testing::desk_request(4, 16));
    CHECK(inst.triplets.ues() == inst.scenario.num_ues());
    for (const auto& ue : inst.scenario.ues)
        for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 4; ++r) {
                const auto& t = inst.triplets.at(ue.id, c, r);
                CHECK(t.cells == ue.serving_set);
                CHECK(t.lambda > 0.0);
            }
}
