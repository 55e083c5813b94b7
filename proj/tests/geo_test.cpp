#include "mcs/geo.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using mcs::GeoPoint;
using mcs::TrajectorySegment;
using testsupport::seg;

// ====================
// Projection
// ====================

TEST(ProjectOntoLine, AxisAlignedPoint) {
  const auto p = mcs::project_onto_line({5, 4}, seg(0, 0, 10, 0));
  EXPECT_DOUBLE_EQ(p.foot.x, 5.0);
  EXPECT_DOUBLE_EQ(p.foot.y, 0.0);
  EXPECT_DOUBLE_EQ(p.offset, 5.0);
}

TEST(ProjectOntoLine, StartPoint) {
  const auto p = mcs::project_onto_line({0, 0}, seg(0, 0, 10, 0));
  EXPECT_DOUBLE_EQ(p.foot.x, 0.0);
  EXPECT_DOUBLE_EQ(p.foot.y, 0.0);
  EXPECT_DOUBLE_EQ(p.offset, 0.0);
}

TEST(ProjectOntoLine, BeforeSegmentStart) {
  const auto p = mcs::project_onto_line({-2, 3}, seg(0, 0, 10, 0));
  EXPECT_DOUBLE_EQ(p.foot.x, -2.0);
  EXPECT_DOUBLE_EQ(p.foot.y, 0.0);
  EXPECT_DOUBLE_EQ(p.offset, -2.0);
}

TEST(ProjectOntoLine, DegenerateSegmentThrows) {
  EXPECT_THROW(mcs::project_onto_line({1, 1}, seg(3, 3, 3, 3)), mcs::DegenerateSegmentError);
}

// ====================
// Distance components
// ====================

TEST(PerpendicularDistance, ParallelOffsetSegments) {
  // offsets 5 and 5: (25+25)/(5+5)
  EXPECT_DOUBLE_EQ(mcs::perpendicular_distance(seg(0, 0, 10, 0), seg(0, 5, 10, 5)), 5.0);
}

TEST(PerpendicularDistance, CollinearIsZero) {
  EXPECT_DOUBLE_EQ(mcs::perpendicular_distance(seg(0, 0, 10, 0), seg(2, 0, 6, 0)), 0.0);
}

TEST(PerpendicularDistance, OneEndpointOffLine) {
  // offsets 0 and 4: (0+16)/(0+4)
  EXPECT_DOUBLE_EQ(mcs::perpendicular_distance(seg(0, 0, 10, 0), seg(5, 0, 5, 4)), 4.0);
}

TEST(ParallelDistance, InteriorSpan) {
  EXPECT_DOUBLE_EQ(mcs::parallel_distance(seg(0, 0, 10, 0), seg(2, 1, 6, 1)), 2.0);
}

TEST(ParallelDistance, AlignedSpans) {
  EXPECT_DOUBLE_EQ(mcs::parallel_distance(seg(0, 0, 10, 0), seg(0, 1, 10, 1)), 0.0);
}

TEST(ParallelDistance, BothEndpointsProjectToMidpoint) {
  EXPECT_DOUBLE_EQ(mcs::parallel_distance(seg(0, 0, 10, 0), seg(5, 0, 5, 4)), 5.0);
}

TEST(AngleDistance, RightAngle) {
  EXPECT_DOUBLE_EQ(mcs::angle_distance(seg(0, 0, 10, 0), seg(5, 0, 5, 4)), 4.0);
}

TEST(AngleDistance, ParallelIsZero) {
  EXPECT_DOUBLE_EQ(mcs::angle_distance(seg(0, 0, 10, 0), seg(0, 1, 10, 1)), 0.0);
}

TEST(AngleDistance, ThirtyDegrees) {
  const double c = 10.0 * std::cos(mcs::deg_to_rad(30.0));
  const double s = 10.0 * std::sin(mcs::deg_to_rad(30.0));
  EXPECT_NEAR(mcs::angle_distance(seg(0, 0, 20, 0), seg(0, 0, c, s)), 5.0, 1e-12);
}

// ====================
// Combined distance
// ====================

TEST(SegmentDistance, IdenticalSegmentsAreZero) {
  const auto a = seg(1.5, -2.25, 7.5, 3.125);
  EXPECT_DOUBLE_EQ(mcs::segment_distance(a, a), 0.0);
}

TEST(SegmentDistance, ParallelOffsetPair) {
  EXPECT_DOUBLE_EQ(mcs::segment_distance(seg(0, 0, 10, 0), seg(0, 5, 10, 5)), 5.0);
}

TEST(SegmentDistance, PerpendicularSpike) {
  EXPECT_DOUBLE_EQ(mcs::segment_distance(seg(0, 0, 10, 0), seg(5, 0, 5, 4)), 13.0);
}

TEST(SegmentDistance, BothDegenerateFallsBackToPointDistance) {
  EXPECT_DOUBLE_EQ(mcs::segment_distance(seg(0, 0, 0, 0), seg(3, 4, 3, 4)), 5.0);
}

TEST(SegmentDistance, SymmetricUnderArgumentSwap) {
  testsupport::Random rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto a = testsupport::random_segment(rng, "a");
    const auto b = testsupport::random_segment(rng, "b");
    EXPECT_EQ(mcs::segment_distance(a, b), mcs::segment_distance(b, a));
  }
}

TEST(SegmentDistance, NonNegativeComponents) {
  testsupport::Random rng(12);
  for (int i = 0; i < 200; ++i) {
    const auto a = testsupport::random_segment(rng);
    const auto b = testsupport::random_segment(rng);
    EXPECT_GE(mcs::perpendicular_distance(a, b), 0.0);
    EXPECT_GE(mcs::parallel_distance(a, b), 0.0);
    EXPECT_GE(mcs::angle_distance(a, b), 0.0);
    EXPECT_GE(mcs::segment_distance(a, b), 0.0);
  }
}

TEST(SegmentDistance, TranslationInvariance) {
  testsupport::Random rng(13);
  for (int i = 0; i < 100; ++i) {
    auto a = testsupport::random_segment(rng);
    auto b = testsupport::random_segment(rng);
    const double d = mcs::segment_distance(a, b);
    const double tx = rng.uniform(-5.0, 5.0);
    const double ty = rng.uniform(-5.0, 5.0);
    for (auto* s : {&a, &b}) {
      s->start.point.x += tx;
      s->start.point.y += ty;
      s->end.point.x += tx;
      s->end.point.y += ty;
    }
    EXPECT_NEAR(mcs::segment_distance(a, b), d, 1e-9 * std::max(1.0, d));
  }
}

TEST(SegmentDistance, RotationInvariance) {
  testsupport::Random rng(14);
  for (int i = 0; i < 100; ++i) {
    auto a = testsupport::random_segment(rng);
    auto b = testsupport::random_segment(rng);
    const double d0 = mcs::segment_distance(a, b);
    const double fd0 = mcs::following_degree(a, b);
    const double phi = rng.uniform(0.0, 2.0 * mcs::kPi);
    const double c = std::cos(phi), s = std::sin(phi);
    const auto rotate = [&](mcs::GeoPoint& p) {
      const double x = p.x * c - p.y * s;
      const double y = p.x * s + p.y * c;
      p.x = x;
      p.y = y;
    };
    for (auto* t : {&a, &b}) {
      rotate(t->start.point);
      rotate(t->end.point);
    }
    EXPECT_NEAR(mcs::segment_distance(a, b), d0, 1e-9 * std::max(1.0, d0));
    EXPECT_NEAR(mcs::following_degree(a, b), fd0, 1e-9);
  }
}

TEST(SegmentDistance, MatchesIndependentOracle) {
  testsupport::Random rng(0x5eed);
  for (int i = 0; i < 1000; ++i) {
    const auto a = testsupport::random_segment(rng, "a");
    const auto b = testsupport::random_segment(rng, "b");
    const double got = mcs::segment_distance(a, b);
    const double want = testsupport::oracle_distance(a, b);
    EXPECT_LE(std::abs(got - want), 1e-9 * std::max({std::abs(got), std::abs(want), 1e-6}))
        << "pair " << i;
  }
}

// ====================
// Following degree
// ====================

TEST(FollowingDegree, ParallelSameOffset) {
  EXPECT_DOUBLE_EQ(mcs::following_degree(seg(0, 0, 1, 0), seg(0, 3, 1, 3)), 1.0);
}

TEST(FollowingDegree, SameStartDiverging) {
  EXPECT_DOUBLE_EQ(mcs::following_degree(seg(0, 0, 1, 0), seg(0, 0, 1, 4)), -1.0);
}

TEST(FollowingDegree, Converging) {
  // start gap 4, end gap 2
  EXPECT_DOUBLE_EQ(mcs::following_degree(seg(0, 0, 1, 0), seg(0, 4, 1, 2)), 0.5);
}

TEST(FollowingDegree, IdenticalSegments) {
  const auto a = seg(2, 2, 5, 5);
  EXPECT_DOUBLE_EQ(mcs::following_degree(a, a), 1.0);
}

TEST(FollowingDegree, AlwaysWithinRange) {
  testsupport::Random rng(15);
  for (int i = 0; i < 500; ++i) {
    const auto a = testsupport::random_segment(rng);
    const auto b = testsupport::random_segment(rng);
    const double fd = mcs::following_degree(a, b);
    EXPECT_GE(fd, -1.0);
    EXPECT_LE(fd, 1.0);
  }
}

// ====================
// Direction and speed
// ====================

TEST(Direction, CardinalAngles) {
  EXPECT_DOUBLE_EQ(mcs::direction(seg(0, 0, 1, 0)), 0.0);
  EXPECT_DOUBLE_EQ(mcs::direction(seg(0, 0, 0, 1)), 90.0);
  EXPECT_DOUBLE_EQ(mcs::direction(seg(0, 0, -1, 0)), 180.0);
  EXPECT_DOUBLE_EQ(mcs::direction(seg(0, 0, 0, -1)), 270.0);
}

TEST(Direction, DegenerateThrows) {
  EXPECT_THROW(mcs::direction(seg(1, 1, 1, 1)), mcs::DegenerateSegmentError);
}

TEST(Direction, ReversalAddsHalfTurn) {
  testsupport::Random rng(16);
  for (int i = 0; i < 200; ++i) {
    const auto a = testsupport::random_segment(rng);
    if (a.spatially_degenerate()) continue;
    const auto reversed = seg(a.end.point.x, a.end.point.y, a.start.point.x, a.start.point.y);
    const double expected = std::fmod(mcs::direction(a) + 180.0, 360.0);
    EXPECT_NEAR(mcs::direction(reversed), expected, 1e-9);
  }
}

TEST(Speed, ThreeFourFiveTriangle) {
  EXPECT_DOUBLE_EQ(mcs::speed(seg(0, 0, 30, 40, 0, 5)), 10.0);
}

TEST(Speed, StationarySensor) {
  EXPECT_DOUBLE_EQ(mcs::speed(seg(2, 2, 2, 2, 0, 10)), 0.0);
}

TEST(Speed, SlowDrift) {
  EXPECT_NEAR(mcs::speed(seg(0, 0, 0.002, 0, 0, 60)), 0.002 / 60.0, 1e-18);
}

TEST(Speed, NonPositiveTimeDeltaThrows) {
  EXPECT_THROW(mcs::speed(seg(0, 0, 1, 0, 5, 5)), mcs::InvalidSegmentError);
  EXPECT_THROW(mcs::speed(seg(0, 0, 1, 0, 5, 4)), mcs::InvalidSegmentError);
}

TEST(TranslationInvariance, SpeedAndDirection) {
  testsupport::Random rng(17);
  for (int i = 0; i < 100; ++i) {
    auto a = testsupport::random_segment(rng);
    if (a.spatially_degenerate()) continue;
    const double v = mcs::speed(a);
    const double dir = mcs::direction(a);
    const double tx = rng.uniform(-3.0, 3.0), ty = rng.uniform(-3.0, 3.0);
    a.start.point.x += tx;
    a.start.point.y += ty;
    a.end.point.x += tx;
    a.end.point.y += ty;
    EXPECT_NEAR(mcs::speed(a), v, 1e-12);
    EXPECT_NEAR(mcs::direction(a), dir, 1e-9);
  }
}

// ====================
// Geodesic distance
// ====================

TEST(GeodesicDistance, CoincidentPoints) {
  EXPECT_DOUBLE_EQ(mcs::geodesic_distance({12.5, 45.0}, {12.5, 45.0}), 0.0);
}

TEST(GeodesicDistance, AntipodalOnEquator) {
  EXPECT_NEAR(mcs::geodesic_distance({0, 0}, {180, 0}), mcs::kPi * mcs::kEarthRadiusM, 1e-3);
}

TEST(GeodesicDistance, SmallLatitudeStep) {
  // one millidegree of latitude
  const double meters = mcs::geodesic_distance({0, 0}, {0, 0.001});
  EXPECT_NEAR(meters, mcs::kPi * mcs::kEarthRadiusM / 180.0 * 0.001, 1e-6);
  EXPECT_NEAR(meters, 111.2, 0.1);
}

TEST(GeodesicDistance, RejectsOutOfRange) {
  EXPECT_THROW(mcs::geodesic_distance({0, 91}, {0, 0}), mcs::InvalidCoordinateError);
  EXPECT_THROW(mcs::geodesic_distance({-181, 0}, {0, 0}), mcs::InvalidCoordinateError);
  EXPECT_THROW(mcs::geodesic_distance({0, std::nan("")}, {0, 0}), mcs::InvalidCoordinateError);
}

// ====================
// Small helpers
// ====================

TEST(AngularDifference, WrapsAroundSeam) {
  EXPECT_DOUBLE_EQ(mcs::angular_difference(359.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(mcs::angular_difference(0.0, 180.0), 180.0);
  EXPECT_DOUBLE_EQ(mcs::angular_difference(90.0, 90.0), 0.0);
}

TEST(PointToSegmentDistance, ClampsToEndpoints) {
  EXPECT_DOUBLE_EQ(mcs::point_to_segment_distance({-3, 4}, {0, 0}, {10, 0}), 5.0);
  EXPECT_DOUBLE_EQ(mcs::point_to_segment_distance({5, 2}, {0, 0}, {10, 0}), 2.0);
}
