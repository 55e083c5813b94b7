#include "mcs/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "mcs/clustering.hpp"
#include "support.hpp"

using mcs::Cluster;
using mcs::TrajectorySegment;
using testsupport::seg;

namespace {

Cluster make_cluster(std::vector<TrajectorySegment> members) {
  Cluster c;
  c.core = members.front();
  c.center = mcs::cluster_center(members);
  c.members = std::move(members);
  return c;
}

}  // namespace

// ====================
// SSE
// ====================

TEST(Sse, SingletonClustersScoreZero) {
  std::vector<Cluster> clusters;
  for (int i = 0; i < 5; ++i) {
    clusters.push_back(make_cluster({seg(i, 0, i + 1, 0, 0, 1, "s" + std::to_string(i))}));
  }
  EXPECT_DOUBLE_EQ(mcs::sse(clusters), 0.0);
}

TEST(Sse, TwoMemberClusterExpandsTheDoubleSum) {
  // pairwise distance 5, so (1/(2*2)) * (0+5+5+0)
  const std::vector<Cluster> clusters{
      make_cluster({seg(0, 0, 10, 0, 0, 1, "a"), seg(0, 5, 10, 5, 0, 1, "b")})};
  EXPECT_DOUBLE_EQ(mcs::sse(clusters), 2.5);
}

TEST(Sse, IdenticalMembersScoreZero) {
  std::vector<TrajectorySegment> members;
  for (int i = 0; i < 9; ++i) members.push_back(seg(2, 3, 4, 5, 0, 1, "s" + std::to_string(i)));
  EXPECT_DOUBLE_EQ(mcs::sse(std::vector<Cluster>{make_cluster(members)}), 0.0);
}

TEST(Sse, PermutationInvariant) {
  testsupport::Random rng(41);
  std::vector<TrajectorySegment> members;
  for (int i = 0; i < 12; ++i) members.push_back(testsupport::random_segment(rng, "m" + std::to_string(i)));
  std::vector<Cluster> clusters{make_cluster(members)};
  const double base = mcs::sse(clusters);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(members.begin(), members.end(), rng.engine());
    EXPECT_NEAR(mcs::sse(std::vector<Cluster>{make_cluster(members)}), base,
                1e-9 * std::max(1.0, base));
  }
}

TEST(Sse, MergingIdenticalMemberClustersDoesNotDecrease) {
  testsupport::Random rng(42);
  std::vector<TrajectorySegment> members;
  for (int i = 0; i < 8; ++i) members.push_back(testsupport::random_segment(rng, "m" + std::to_string(i)));
  const std::vector<Cluster> split{make_cluster(members), make_cluster(members)};
  std::vector<TrajectorySegment> merged_members = members;
  merged_members.insert(merged_members.end(), members.begin(), members.end());
  const std::vector<Cluster> merged{make_cluster(merged_members)};
  EXPECT_GE(mcs::sse(merged) + 1e-12, mcs::sse(split));
}

// ====================
// Tra-XB
// ====================

TEST(TraXb, SingleClusterIsUndefined) {
  const std::vector<Cluster> clusters{make_cluster({seg(0, 0, 1, 0, 0, 1, "a")})};
  const auto r = mcs::tra_xb(clusters);
  EXPECT_FALSE(r.value.has_value());
  EXPECT_FALSE(r.undefined_reason.empty());
}

TEST(TraXb, PerfectlyTightClustersScoreZero) {
  // members coincide with their centers, numerator vanishes
  std::vector<TrajectorySegment> a, b;
  for (int i = 0; i < 3; ++i) a.push_back(seg(0, 0, 1, 0, 0, 1, "a" + std::to_string(i)));
  for (int i = 0; i < 3; ++i) b.push_back(seg(7, 7, 8, 7, 0, 1, "b" + std::to_string(i)));
  const std::vector<Cluster> clusters{make_cluster(a), make_cluster(b)};
  const auto r = mcs::tra_xb(clusters);
  ASSERT_TRUE(r.value.has_value());
  EXPECT_DOUBLE_EQ(*r.value, 0.0);
}

TEST(TraXb, CoincidentCentersAreUndefined) {
  std::vector<TrajectorySegment> a{seg(0, 0, 1, 0, 0, 1, "a0"), seg(0, 0, 1, 0, 0, 1, "a1")};
  const std::vector<Cluster> clusters{make_cluster(a), make_cluster(a)};
  const auto r = mcs::tra_xb(clusters);
  EXPECT_FALSE(r.value.has_value());
  EXPECT_NE(r.undefined_reason.find("coincident"), std::string::npos);
}

TEST(TraXb, TranslatingAClusterFartherStrictlyDecreases) {
  testsupport::Random rng(43);
  std::vector<TrajectorySegment> a, b;
  for (int i = 0; i < 6; ++i) {
    const double jx = rng.uniform(-0.2, 0.2), jy = rng.uniform(-0.2, 0.2);
    a.push_back(seg(jx, jy, 1 + jx, jy, 0, 1, "a" + std::to_string(i)));
    b.push_back(seg(5 + jx, jy, 6 + jx, jy, 0, 1, "b" + std::to_string(i)));
  }
  const std::vector<Cluster> near{make_cluster(a), make_cluster(b)};
  const auto r_near = mcs::tra_xb(near);

  std::vector<TrajectorySegment> b_far = b;
  for (TrajectorySegment& ts : b_far) {
    ts.start.point.x += 20.0;
    ts.end.point.x += 20.0;
  }
  const std::vector<Cluster> far{make_cluster(a), make_cluster(b_far)};
  const auto r_far = mcs::tra_xb(far);

  ASSERT_TRUE(r_near.value.has_value());
  ASSERT_TRUE(r_far.value.has_value());
  EXPECT_LT(*r_far.value, *r_near.value);
}

TEST(TraXb, InvariantUnderClusterRelabeling) {
  testsupport::Random rng(44);
  std::vector<Cluster> clusters;
  for (int c = 0; c < 4; ++c) {
    std::vector<TrajectorySegment> members;
    for (int i = 0; i < 5; ++i) {
      const double bx = 3.0 * c;
      const double jx = rng.uniform(-0.1, 0.1), jy = rng.uniform(-0.1, 0.1);
      members.push_back(seg(bx + jx, jy, bx + 1 + jx, jy, 0, 1,
                            "c" + std::to_string(c) + "_" + std::to_string(i)));
    }
    clusters.push_back(make_cluster(members));
  }
  const auto base = mcs::tra_xb(clusters);
  ASSERT_TRUE(base.value.has_value());
  for (int trial = 0; trial < 4; ++trial) {
    std::shuffle(clusters.begin(), clusters.end(), rng.engine());
    const auto shuffled = mcs::tra_xb(clusters);
    ASSERT_TRUE(shuffled.value.has_value());
    EXPECT_NEAR(*shuffled.value, *base.value, 1e-9 * std::max(1.0, *base.value));
  }
}

// ====================
// Spatial / temporal error
// ====================

TEST(SpatialError, ExactCenterHit) {
  mcs::ClusterCenter hit{0.5, 0.0, 10.0, {{1.5, 2.0}, 0.0}};  // ends at (2.0, 2.0)
  const std::vector<mcs::ClusterCenter> centers{hit};
  EXPECT_DOUBLE_EQ(mcs::spatial_error({2.0, 2.0}, centers), 0.0);
}

TEST(SpatialError, PicksTheClosestEndpoint) {
  mcs::ClusterCenter near{0.002, 0.0, 10.0, {{0, 0}, 0}};
  mcs::ClusterCenter far{0.003, 0.0, 10.0, {{0, 0}, 0}};
  const std::vector<mcs::ClusterCenter> centers{far, near};
  EXPECT_DOUBLE_EQ(mcs::spatial_error({0.0, 0.0}, centers), 0.002);
}

TEST(SpatialError, EmptyCentersThrow) {
  EXPECT_THROW(mcs::spatial_error({0, 0}, {}), mcs::NoEstimateError);
}

TEST(SpatialError, MonotoneUnderAddedCenters) {
  testsupport::Random rng(45);
  std::vector<mcs::ClusterCenter> centers;
  const mcs::GeoPoint target{0.5, 0.5};
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    centers.push_back(
        {rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0, {{rng.uniform(-1, 1), rng.uniform(-1, 1)}, 0}});
    const double e = mcs::spatial_error(target, centers);
    EXPECT_LE(e, previous + 1e-15);
    previous = e;
  }
}

TEST(SpatialError, VehicleOverloadUsesItsSegmentArrivalNode) {
  mcs::JourneyService svc;
  svc.id = "svc";
  svc.segments.push_back({{0, 0}, {1, 0}, 1, 1, 1});
  svc.segments.push_back({{1, 0}, {2, 0}, 1, 1, 1});
  mcs::JourneyVehicle vehicle;
  vehicle.service_id = "svc";
  vehicle.segment_index = 1;  // arrival node (2, 0)
  mcs::ClusterCenter cc{0.5, 0.0, 5.0, {{1.4, 0.0}, 0.0}};  // ends at (1.9, 0)
  const std::vector<mcs::ClusterCenter> centers{cc};
  EXPECT_NEAR(mcs::spatial_error(vehicle, svc, centers), 0.1, 1e-12);
}

TEST(TemporalError, SignedDifference) {
  EXPECT_DOUBLE_EQ(mcs::temporal_error(540.0, 540.0), 0.0);
  EXPECT_DOUBLE_EQ(mcs::temporal_error(540.0, 541.0), -1.0);
  EXPECT_DOUBLE_EQ(mcs::temporal_error(33.75, 30.0), 3.75);
}
