// SPDX-License-Identifier: Apache-2.0
#include "auric/error.hpp"
#include "auric/face_gate.hpp"
#include "auric/session_engine.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace auric;
using namespace auric::test;

namespace {

const double kHalfRoot2 = std::sqrt(2.0) / 2.0;

EnrollmentProfile axis_profile() {
    std::vector<Embedding> portraits{{1.0, 0.0}, {0.0, 1.0}, {kHalfRoot2, kHalfRoot2}};
    return enroll("owner", portraits);
}

SessionRecord with_scores(const std::vector<std::optional<double>>& scores) {
    SessionRecord s;
    s.session_id = "s";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        s.captures.push_back(CaptureRecord{static_cast<Millis>(i), scores[i], "ref"});
    }
    return s;
}

ErrorCode enroll_error(const std::vector<Embedding>& portraits) {
    try {
        enroll("o", portraits);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected enroll to fail");
    return ErrorCode::IoFailure;
}

}  // namespace

TEST_CASE("enroll") {
    auto p = axis_profile();
    CHECK(p.dimension() == 2);
    CHECK(p.owner_id == "owner");

    CHECK(enroll_error({{1.0, 0.0}, {0.0, 1.0}}) == ErrorCode::WrongPortraitCount);
    CHECK(enroll_error({{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}}) == ErrorCode::WrongPortraitCount);
    CHECK(enroll_error({{1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}}) == ErrorCode::BadEmbedding);
    CHECK(enroll_error({{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0, 1.0}}) == ErrorCode::BadEmbedding);
}

TEST_CASE("classify_sample reference values") {
    const auto p = axis_profile();
    // dots 1, 0, 0.7071 -> 1
    auto v = classify_sample(CaptureSample{Embedding{1.0, 0.0}}, p);
    REQUIRE(v.face_detected());
    CHECK(*v.best_score == doctest::Approx(1.0));
    // dots 0, -1, -0.7071 -> clamped 0
    v = classify_sample(CaptureSample{Embedding{0.0, -1.0}}, p);
    REQUIRE(v.face_detected());
    CHECK(*v.best_score == 0.0);

    CHECK(classify_sample(CaptureSample{}, p) == CaptureVerdict::no_face());

    try {
        classify_sample(CaptureSample{Embedding{1.0, 0.0, 0.0}}, p);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("flag_session") {
    const auto s = with_scores({0.9, std::nullopt, 0.3});
    CHECK(flag_session(s, {0.6, Aggregation::Any}));
    CHECK_FALSE(flag_session(s, {0.6, Aggregation::Majority}));  // 1 vs 1

    const auto faceless = with_scores({std::nullopt, std::nullopt});
    CHECK_FALSE(flag_session(faceless, {0.6, Aggregation::Any}));
    CHECK_FALSE(flag_session(faceless, {0.6, Aggregation::Majority}));

    const auto low = with_scores({0.0, 0.0});
    CHECK_FALSE(flag_session(low, {0.0, Aggregation::Any}));
    CHECK(flag_session(low, {0.01, Aggregation::Majority}));

    // boundary: score == threshold counts as owner
    CHECK_FALSE(flag_session(with_scores({0.6}), {0.6, Aggregation::Any}));
}

TEST_CASE("flag_day") {
    const FlagFilter f{0.6, Aggregation::Any};
    CHECK_FALSE(flag_day({}, f));
    std::vector<SessionRecord> mixed{with_scores({0.9}), with_scores({0.1})};
    CHECK(flag_day(mixed, f));
    std::vector<SessionRecord> clean{with_scores({0.9}), with_scores({std::nullopt})};
    CHECK_FALSE(flag_day(clean, f));
}

TEST_CASE("aggregation names") {
    CHECK(parse_aggregation("ANY") == Aggregation::Any);
    CHECK(parse_aggregation("majority") == Aggregation::Majority);
    CHECK_FALSE(parse_aggregation("most"));
    CHECK(to_string(Aggregation::Majority) == "majority");
}

TEST_CASE("property: best score is the triple-loop maximum") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        const auto dim = 1 + rng() % 12;
        const auto profile = random_profile(rng, dim);
        const auto face = unit_vector(rng, dim);
        double best = 0.0;
        for (std::size_t p = 0; p < 3; ++p) {
            double dot = 0.0;
            for (std::size_t k = 0; k < dim; ++k) dot += face[k] * profile.portraits[p][k];
            best = std::max(best, dot);
        }
        const auto v = classify_sample(CaptureSample{face}, profile);
        REQUIRE(v.face_detected());
        CHECK(*v.best_score == doctest::Approx(std::min(best, 1.0)).epsilon(1e-12));
        CHECK(*v.best_score >= 0.0);
        CHECK(*v.best_score <= 1.0);
    }
}

TEST_CASE("property: threshold monotonicity and majority within any") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::optional<double>> scores;
        for (auto n = rng() % 8; n > 0; --n) {
            if (rng() % 4 == 0) {
                scores.emplace_back();
            } else {
                scores.emplace_back(u(rng));
            }
        }
        const auto s = with_scores(scores);
        double t1 = u(rng), t2 = u(rng);
        if (t1 > t2) std::swap(t1, t2);
        for (auto agg : {Aggregation::Any, Aggregation::Majority}) {
            CHECK_FALSE(flag_session(s, {0.0, agg}));
        }
        if (flag_session(s, {t1, Aggregation::Any})) CHECK(flag_session(s, {t2, Aggregation::Any}));
        if (flag_session(s, {t1, Aggregation::Majority})) CHECK(flag_session(s, {t1, Aggregation::Any}));
    }
}
