#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pih/env/geometry.hpp"
#include "pih/env/object_catalog.hpp"
#include "pih/env/peg_hole_env.hpp"

namespace pih {
namespace {

EnvConfig small_config(Task task) {
  EnvConfig c;
  c.task = task;
  c.render.height = 16;
  c.render.width = 16;
  return c;
}

ObjectPair cube() { return ObjectCatalog::default_catalog().get("cube"); }

Action make_action(std::array<double, 6> d) {
  Action a;
  a.delta = d;
  return a;
}

void expect_pose_near(const Pose& a, const Pose& b, double tol) {
  const auto x = a.to_array();
  const auto y = b.to_array();
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], tol) << "component " << i;
}

class EnvTest : public ::testing::Test {
 protected:
  PegHoleEnv env{small_config(Task::kPiH), cube()};
  Pose hole;

  void SetUp() override {
    RandomStream s(17);
    env.reset(s);
    hole = env.state().hole_pose;
  }
};

TEST(Reset, PoohStartsInsertedWithNegativeReward) {
  PegHoleEnv env(small_config(Task::kPooH), cube());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream s(seed);
    const auto r = env.reset(s);
    EXPECT_GE(r.state.insertion_depth, 0.01);
    EXPECT_LT(reward(r.state, r.goals), 0.0);
    EXPECT_GT(r.goals.goal_peg.z, r.state.hole_pose.z);
    EXPECT_EQ(r.goals.goal_hole, r.state.hole_pose);
    EXPECT_NO_THROW(r.obs.validate(16, 16));
  }
}

TEST(Reset, EqualSeedsGiveIdenticalEpisodes) {
  PegHoleEnv a(small_config(Task::kPiH), cube());
  PegHoleEnv b(small_config(Task::kPiH), cube());
  RandomStream sa(99);
  RandomStream sb(99);
  const auto ra = a.reset(sa);
  const auto rb = b.reset(sb);
  EXPECT_EQ(ra.state.peg_pose, rb.state.peg_pose);
  EXPECT_EQ(ra.state.hole_pose, rb.state.hole_pose);
  EXPECT_EQ(ra.goals, rb.goals);
  EXPECT_EQ(ra.obs, rb.obs);
}

TEST(Reset, PihStartWithUnitPostureWeightIsPoohGoal) {
  EnvConfig pooh = small_config(Task::kPooH);
  EnvConfig pih = small_config(Task::kPiH);
  pih.posture_weight = {1.0, 1.0};
  PegHoleEnv e_out(pooh, cube());
  PegHoleEnv e_in(pih, cube());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomStream s1(seed);
    RandomStream s2(seed);
    const auto out = e_out.reset(s1);
    const auto in = e_in.reset(s2);
    expect_pose_near(in.state.peg_pose, out.goals.goal_peg, 1e-15);
    EXPECT_EQ(in.goals.goal_peg, e_in.inserted_pose());
    EXPECT_EQ(in.state.insertion_depth, 0.0);
  }
}

TEST(Reset, HoleJitterStaysInRange) {
  PegHoleEnv env(small_config(Task::kPiH), cube());
  const auto& c = env.config();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomStream s(seed);
    const auto r = env.reset(s);
    EXPECT_LE(std::abs(r.state.hole_pose.x - c.hole_nominal[0]), c.hole_jitter);
    EXPECT_LE(std::abs(r.state.hole_pose.y - c.hole_nominal[1]), c.hole_jitter);
    EXPECT_EQ(r.state.hole_pose.z, c.hole_nominal[2]);
  }
}

TEST_F(EnvTest, FreeSpaceStepAdvancesByAction) {
  Pose start = hole;
  start.z += 0.05;
  env.teleport(start);
  const Action a = make_action({0.01, -0.015, 0.005, 0.02, -0.01, 0.03});
  const auto r = env.step(a);
  expect_pose_near(r.state.peg_pose, start + a, 1e-15);
  EXPECT_EQ(r.state.contact_force, 0.0);
}

TEST_F(EnvTest, PressingOnBoardBesideHoleIsBlocked) {
  Pose start = hole;
  start.x += 0.05;
  env.teleport(start);
  const auto r = env.step(make_action({0, 0, -0.005, 0, 0, 0}));
  EXPECT_EQ(r.state.peg_pose.z, hole.z);
  // One active constraint: the blocked displacement is the whole command.
  EXPECT_NEAR(r.state.contact_force, env.config().contact_stiffness * 0.005, 1e-9);
  EXPECT_EQ(r.state.insertion_depth, 0.0);
}

TEST_F(EnvTest, AlignedDescentDeepens) {
  Pose start = hole;
  start.z -= 0.004;
  env.teleport(start);
  const double before = env.state().insertion_depth;
  const auto r = env.step(make_action({0, 0, -0.005, 0, 0, 0}));
  EXPECT_NEAR(r.state.insertion_depth - before, 0.005, 1e-12);
  EXPECT_NEAR(r.state.insertion_depth, 0.009, 1e-12);
  EXPECT_FALSE(r.success);
  EXPECT_FALSE(r.done);
  const auto r2 = env.step(make_action({0, 0, -0.002, 0, 0, 0}));
  EXPECT_TRUE(r2.success);
  EXPECT_TRUE(r2.done);
}

TEST_F(EnvTest, EntryFromAboveWithSmallOffsetFits) {
  Pose start = hole;
  start.x += 0.0004;  // inside the 1 mm clearance
  start.z += 0.002;
  env.teleport(start);
  const auto r = env.step(make_action({0, 0, -0.01, 0, 0, 0}));
  EXPECT_NEAR(r.state.insertion_depth, 0.008, 1e-12);
  EXPECT_NEAR(r.state.peg_pose.x, start.x, 1e-15);
}

TEST_F(EnvTest, TiltJamsAtTheMouth) {
  Pose start = hole;
  start.z += 0.001;
  start.theta_x = 0.06;
  start.theta_y = 0.06;
  env.teleport(start);
  const auto r = env.step(make_action({0, 0, -0.005, 0, 0, 0}));
  EXPECT_EQ(r.state.peg_pose.z, hole.z);
  EXPECT_EQ(r.state.insertion_depth, 0.0);
  EXPECT_NEAR(r.state.contact_force, env.config().contact_stiffness * 0.004, 1e-9);
}

TEST_F(EnvTest, LateralMotionInsideHoleIsLimitedByWalls) {
  Pose start = hole;
  start.z -= 0.01;
  env.teleport(start);
  const auto r = env.step(make_action({0.01, 0, 0, 0, 0, 0}));
  EXPECT_LE(std::abs(r.state.peg_pose.x - hole.x), env.pair().clearance + 1e-9);
  EXPECT_GT(r.state.contact_force, 0.0);
  EXPECT_GT(r.state.insertion_depth, 0.0);
}

TEST_F(EnvTest, NanActionIsRejected) {
  Action a;
  a[0] = std::nan("");
  EXPECT_THROW(env.step(a), ValidationError);
  Action big;
  big[0] = 0.03;
  EXPECT_THROW(env.step(big), ValidationError);
}

TEST_F(EnvTest, TeleportIntoBoardIsRejected) {
  Pose bad = hole;
  bad.x += 0.05;
  bad.z -= 0.01;
  EXPECT_THROW(env.teleport(bad), ValidationError);
}

TEST_F(EnvTest, EpisodeEndsAtLength) {
  Pose start = hole;
  start.z += 0.05;
  env.teleport(start);
  bool done = false;
  int steps = 0;
  while (!done) {
    done = env.step(Action{}).done;
    ++steps;
  }
  EXPECT_EQ(steps, env.config().episode_len);
}

TEST(Reward, Examples) {
  EnvState s;
  GoalSpec g{Pose{0.5, 0.1, 0.2, 0.1, 0.0, -0.2}, Pose{0.5, 0.1, 0.22, 0, 0, 0}};
  s.peg_pose = g.goal_peg;
  s.hole_pose = g.goal_hole;
  EXPECT_EQ(reward(s, g), 0.0);
  s.peg_pose.x += 0.01;
  EXPECT_NEAR(reward(s, g), -1e-4, 1e-18);
  s.hole_pose.y += 0.02;
  EXPECT_NEAR(reward(s, g), -5e-4, 1e-18);
}

TEST(Reward, RotationWeightScalesAngleTermsOnly) {
  EnvState s;
  GoalSpec g;
  s.peg_pose.x = 0.01;
  s.peg_pose.theta_z = 0.1;
  EXPECT_NEAR(reward(s, g, 1.0), -(1e-4 + 1e-2), 1e-15);
  EXPECT_NEAR(reward(s, g, 0.01), -(1e-4 + 1e-4), 1e-15);
}

TEST(Success, Boundaries) {
  const EnvConfig c = small_config(Task::kPiH);
  EnvState s;
  GoalSpec g;
  s.insertion_depth = 0.012;
  EXPECT_TRUE(is_success(s, Task::kPiH, g, c));
  s.insertion_depth = 0.01;
  EXPECT_FALSE(is_success(s, Task::kPiH, g, c));
  s.insertion_depth = 0.0;
  g.goal_peg = Pose{0.5, 0.13, 0.25, 0, 0, 0};
  s.peg_pose = g.goal_peg;
  s.peg_pose.y += 0.002;
  EXPECT_TRUE(is_success(s, Task::kPooH, g, c));
  s.peg_pose.y += 0.004;
  EXPECT_FALSE(is_success(s, Task::kPooH, g, c));
  s.peg_pose = g.goal_peg;
  s.insertion_depth = 0.001;
  EXPECT_FALSE(is_success(s, Task::kPooH, g, c));
}

TEST(Config, ValidationRejectsBadValues) {
  EnvConfig c;
  EXPECT_NO_THROW(c.validate());
  c.episode_len = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = EnvConfig{};
  c.contact_stiffness = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = EnvConfig{};
  c.friction = -0.1;
  EXPECT_THROW(c.validate(), ValidationError);
  c = EnvConfig{};
  c.clearance = 0.0015;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, DigestTracksFields) {
  EnvConfig a;
  EnvConfig b;
  EXPECT_EQ(a.digest(), b.digest());
  b.friction = 0.31;
  EXPECT_NE(a.digest(), b.digest());
}

TEST(Workspace, ClipKeepsTargetInsideBox) {
  const EnvConfig c;
  Pose p{c.hole_nominal[0] + c.workspace_xy - 0.005, c.hole_nominal[1], c.hole_nominal[2] + c.workspace_z,
         c.workspace_angle, 0, 0};
  const Action a = make_action({0.02, -0.02, 0.01, 0.05, -0.05, 0.0});
  const Action out = workspace_clip(c, p, a);
  EXPECT_NEAR(out[0], 0.005, 1e-15);
  EXPECT_EQ(out[1], -0.02);
  EXPECT_EQ(out[2], 0.0);
  EXPECT_EQ(out[3], 0.0);
  EXPECT_EQ(out[4], -0.05);
  // A peg already outside may always move back towards the box.
  p.x += 0.1;
  EXPECT_EQ(workspace_clip(c, p, make_action({-0.02, 0, 0, 0, 0, 0}))[0], -0.02);
  EXPECT_EQ(workspace_clip(c, p, make_action({0.02, 0, 0, 0, 0, 0}))[0], 0.0);
}

TEST(Property, NonPenetrationAndForceUnderRandomActions) {
  const ObjectCatalog catalog = ObjectCatalog::default_catalog();
  for (const auto& pair : catalog.pairs()) {
    PegHoleEnv env(small_config(Task::kPooH), pair);
    std::mt19937_64 rng(std::hash<std::string>{}(pair.name));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::uint64_t ep = 0; ep < 4; ++ep) {
      RandomStream s(ep);
      env.reset(s);
      for (int t = 0; t < 50; ++t) {
        Action a;
        for (int j = 0; j < kActionDim; ++j) a[j] = Action::bound(j) * u(rng);
        a[2] -= 0.005;  // bias towards the board
        a = a.clipped();
        const Pose before = env.state().peg_pose;
        const Action cmd = workspace_clip(env.config(), before, a);
        const auto r = env.step(a);
        ASSERT_TRUE(is_non_penetrating(env.config(), env.pair(), r.state.peg_pose, r.state.hole_pose, 1e-9))
            << pair.name << " ep " << ep << " t " << t;
        EXPECT_LE(r.reward, 0.0);
        EXPECT_GE(r.state.contact_force, 0.0);
        const Action realised = difference(before, r.state.peg_pose);
        bool full = true;
        for (int j = 0; j < kActionDim; ++j) full = full && std::abs(realised[j] - cmd[j]) <= 1e-12;
        if (full) {
          EXPECT_EQ(r.state.contact_force, 0.0) << pair.name << " t " << t;
        }
        if (r.state.insertion_depth > 0.0) {
          const auto off = geometry::Vec2{r.state.peg_pose.x - r.state.hole_pose.x,
                                          r.state.peg_pose.y - r.state.hole_pose.y};
          EXPECT_TRUE(geometry::fits(env.pair().peg_section, env.pair().hole_section(),
                                     geometry::rotate(off, -r.state.hole_pose.theta_z),
                                     r.state.peg_pose.theta_z - r.state.hole_pose.theta_z, 1e-9));
        }
        if (r.done) break;
      }
    }
  }
}

TEST(Property, FreeSpaceReversibility) {
  PegHoleEnv env(small_config(Task::kPiH), cube());
  RandomStream s(1);
  env.reset(s);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Pose start = env.state().hole_pose;
    start.z += 0.08;
    env.teleport(start);
    std::vector<Action> seq;
    for (int t = 0; t < 20; ++t) {
      Action a;
      for (int j = 0; j < kActionDim; ++j) a[j] = 0.5 * Action::bound(j) * u(rng);
      a[2] = std::abs(a[2]) * (t % 2 == 0 ? 1.0 : -1.0);
      seq.push_back(a);
      ASSERT_EQ(env.step(a).state.contact_force, 0.0);
    }
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) env.step(-*it);
    expect_pose_near(env.state().peg_pose, start, 1e-9);
  }
}

TEST(Property, ClearanceMonotonicity) {
  // Alignment strictly inside the smallest clearance succeeds at every clearance.
  std::vector<bool> results;
  for (double clearance : kAllowedClearances) {
    EnvConfig c = small_config(Task::kPiH);
    c.clearance = clearance;
    c.chamfer = 0.0;
    PegHoleEnv env(c, cube());
    RandomStream s(3);
    env.reset(s);
    Pose start = env.state().hole_pose;
    start.x += 0.0003;
    start.y -= 0.0002;
    start.z += 0.004;
    env.teleport(start);
    bool ok = false;
    for (int t = 0; t < 5 && !ok; ++t) ok = env.step(make_action({0, 0, -0.004, 0, 0, 0})).success;
    results.push_back(ok);
  }
  EXPECT_EQ(results, (std::vector<bool>{true, true, true}));
}

TEST(Catalog, DefaultHasSixPairsTwoSeen) {
  const auto cat = ObjectCatalog::default_catalog();
  EXPECT_EQ(cat.pairs().size(), 6u);
  EXPECT_EQ(cat.seen_names(), (std::vector<std::string>{"cube", "d_shape"}));
  EXPECT_EQ(cat.unseen_names().size(), 4u);
  EXPECT_THROW(cat.get("banana"), std::exception);
}

TEST(Catalog, WriteParseRoundTrip) {
  const auto cat = ObjectCatalog::default_catalog();
  std::stringstream io;
  cat.write(io);
  const auto back = ObjectCatalog::parse(io);
  ASSERT_EQ(back.pairs().size(), cat.pairs().size());
  for (std::size_t i = 0; i < cat.pairs().size(); ++i) {
    EXPECT_EQ(back.pairs()[i].name, cat.pairs()[i].name);
    EXPECT_EQ(back.pairs()[i].peg_section, cat.pairs()[i].peg_section);
    EXPECT_EQ(back.pairs()[i].clearance, cat.pairs()[i].clearance);
    EXPECT_EQ(back.pairs()[i].seen, cat.pairs()[i].seen);
  }
}

TEST(Catalog, RejectsBadClearance) {
  std::istringstream in("peg circle 0.01 0.0015 1 0 0 seen\n");
  EXPECT_THROW(ObjectCatalog::parse(in), std::exception);
}

TEST(Geometry, SquareFitsWithinClearance) {
  const auto sq = geometry::Section::polygon({{-0.01, -0.01}, {0.01, -0.01}, {0.01, 0.01}, {-0.01, 0.01}});
  const geometry::HoleSection hole{sq, 0.001};
  EXPECT_TRUE(geometry::fits(sq, hole, {0.0009, 0.0}, 0.0));
  EXPECT_FALSE(geometry::fits(sq, hole, {0.0011, 0.0}, 0.0));
  // At 0.2 rad a corner reaches x = 0.01*sqrt(2)*cos(pi/4 - 0.2) > 0.011.
  EXPECT_FALSE(geometry::fits(sq, hole, {0.0, 0.0}, 0.2));
  EXPECT_TRUE(geometry::fits(sq, hole, {0.0, 0.0}, 0.05));
  EXPECT_NEAR(sq.area(), 4e-4, 1e-18);
  EXPECT_NEAR(sq.support({1.0, 0.0}), 0.01, 1e-15);
  const auto nf = geometry::nearest_fit(sq, hole, {0.003, 0.0}, 0.0);
  ASSERT_TRUE(nf.has_value());
  EXPECT_NEAR(nf->x, 0.001, 1e-9);
  EXPECT_NEAR(geometry::overlap_depth(sq, hole, {0.003, 0.0}, 0.0), 0.002, 1e-9);
}

TEST(Geometry, NonConvexPolygonIsRejected) {
  EXPECT_THROW(geometry::Section::polygon({{0, 0}, {1, 0}, {0.2, 0.2}, {0, 1}}), std::invalid_argument);
}

}  // namespace
}  // namespace pih
