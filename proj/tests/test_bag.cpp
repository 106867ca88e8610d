#include <gtest/gtest.h>

#include "ast/bag.hpp"

namespace ast {
namespace {

// Models told apart by origin[0].
AffineSubspace model(double tag, std::size_t dim = 3) {
  Vector mu(dim, 0.0);
  mu[0] = tag;
  return AffineSubspace(std::move(mu), LinearSubspace(dim));
}

std::vector<double> tags(const ModelBag& bag) {
  std::vector<double> out;
  for (const AffineSubspace& m : bag.all_models()) out.push_back(m.origin()[0]);
  return out;
}

TEST(ModelBag, EmptyBag) {
  ModelBag bag;
  EXPECT_TRUE(bag.all_models().empty());
  EXPECT_TRUE(bag.update_due(1));
  EXPECT_FALSE(bag.frames_since_update(3).has_value());
}

TEST(ModelBag, BootstrapInsertsAtAnyFrame) {
  ModelBag bag;
  EXPECT_TRUE(bag.maybe_update(model(1), 17));
  EXPECT_EQ(tags(bag), std::vector<double>({1}));
  EXPECT_EQ(bag.frames_since_update(20), 3u);
}

TEST(ModelBag, UpdateNotDue) {
  ModelBag bag(10, 5);
  bag.maybe_update(model(1), 5);
  for (std::size_t f = 6; f < 10; ++f) {
    const AffineSubspace* before = &bag.all_models().front();
    EXPECT_FALSE(bag.maybe_update(model(99), f));
    EXPECT_EQ(tags(bag), std::vector<double>({1}));
    EXPECT_EQ(before, &bag.all_models().front());
  }
  EXPECT_TRUE(bag.maybe_update(model(2), 10));
  EXPECT_EQ(tags(bag), std::vector<double>({1, 2}));
}

TEST(ModelBag, RingBehaviour) {
  ModelBag bag(2, 1);
  bag.maybe_update(model(1), 1);
  bag.maybe_update(model(2), 2);
  EXPECT_TRUE(bag.maybe_update(model(3), 3));
  EXPECT_EQ(tags(bag), std::vector<double>({2, 3}));
}

TEST(ModelBag, InsertionOrderAndEviction) {
  ModelBag bag(10, 5);
  std::size_t frame = 5;
  for (int i = 1; i <= 3; ++i, frame += 5) bag.maybe_update(model(i), frame);
  EXPECT_EQ(tags(bag), std::vector<double>({1, 2, 3}));
  for (int i = 4; i <= 12; ++i, frame += 5) bag.maybe_update(model(i), frame);
  EXPECT_EQ(tags(bag), std::vector<double>({3, 4, 5, 6, 7, 8, 9, 10, 11, 12}));
  bag = ModelBag(10, 5);
  frame = 5;
  for (int i = 1; i <= 12; ++i, frame += 5) bag.maybe_update(model(i), frame);
  EXPECT_EQ(bag.size(), 10u);
  EXPECT_EQ(tags(bag).front(), 3.0);
}

TEST(ModelBag, LengthIsMinOfCapacityAndDueInsertions) {
  ModelBag bag(4, 3);
  std::size_t due = 0;
  for (std::size_t f = 1; f <= 40; ++f) {
    if (bag.maybe_update(model(static_cast<double>(f)), f)) ++due;
    ASSERT_EQ(bag.size(), std::min<std::size_t>(4, due));
  }
  EXPECT_EQ(due, 14u);
}

TEST(ModelBag, DimensionMismatch) {
  ModelBag bag;
  bag.maybe_update(model(1, 3), 1);
  EXPECT_THROW(bag.maybe_update(model(2, 4), 10), InvalidInput);
}

TEST(ModelBag, InvalidParameters) {
  EXPECT_THROW(ModelBag(0, 5), InvalidInput);
  EXPECT_THROW(ModelBag(10, 0), InvalidInput);
}

}  // namespace
}  // namespace ast
