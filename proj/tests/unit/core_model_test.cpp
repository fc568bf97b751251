#include <gtest/gtest.h>

#include "support.hpp"

using namespace idea_islands;
using testing_support::Script;

namespace {

SceneState empty_state() { return SceneState::initial("test", LayoutParams{}, TransitionMode::Dive); }

SessionEvent island_created(std::uint64_t seq, std::uint64_t id, const std::string& category) {
  return {seq, 0.0, event::IslandCreated{IslandId{id}, category, layout::place_island(id - 1, LayoutParams{})}};
}

}  // namespace

TEST(CategoryLabel, NormalizesForEquality) {
  EXPECT_EQ(CategoryLabel("  Energy   Saving "), CategoryLabel("energy saving"));
  EXPECT_EQ(CategoryLabel("  Energy   Saving ").display(), "Energy   Saving");
  EXPECT_EQ(CategoryLabel("ENERGY\tSAVING").key(), "energy saving");
  EXPECT_FALSE(CategoryLabel("Energy Saving") == CategoryLabel("Energy Savings"));
}

TEST(CategoryLabel, NonAsciiComparesByteForByte) {
  EXPECT_EQ(CategoryLabel("에너지 절약"), CategoryLabel(" 에너지  절약"));
  EXPECT_EQ(CategoryLabel("에너지 절약").word_count(), 2);
}

TEST(CategoryLabel, RejectsBlank) {
  EXPECT_THROW(CategoryLabel("   "), Error);
}

TEST(WordCount, IgnoresBarePunctuationTokens) {
  EXPECT_EQ(text::word_count("Resource & Waste Management"), 3);
  EXPECT_EQ(text::word_count("Eco-Friendly Diet"), 2);
  EXPECT_EQ(text::word_count("  "), 0);
}

TEST(Fold, FirstIslandOnEmptyState) {
  const auto s = fold_event(empty_state(), island_created(1, 1, "Energy Saving"));
  ASSERT_EQ(s.islands.size(), 1u);
  EXPECT_TRUE(s.islands[0].trees.empty());
  EXPECT_EQ(s.islands[0].cloud_label, "Energy Saving");
  EXPECT_EQ(s.last_seq, 1u);
}

TEST(Fold, FourthTreeTakesSlotThree) {
  Script script;
  for (int i = 0; i < 3; ++i) script.idea(i, "Energy Saving");
  // Oracle: naive append, the new tree's slot is the count before it.
  const auto before = script.state().islands[0].trees.size();
  script.idea(4, "Energy Saving");
  const auto& trees = script.state().islands[0].trees;
  ASSERT_EQ(trees.size(), before + 1);
  EXPECT_EQ(trees.back().slot, TreeSlot::at(static_cast<int>(before)));
  EXPECT_EQ(trees.back().slot.index(), 3);
}

TEST(Fold, SequenceGapRejected) {
  Script script;
  for (int i = 0; i < 5; ++i) script.add(i, event::PoseUpdate{});
  ASSERT_EQ(script.state().last_seq, 5u);
  try {
    fold_event(script.state(), {7, 10.0, event::PoseUpdate{}});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SequenceGap);
  }
}

TEST(Fold, TimeRegressionRejected) {
  Script script;
  script.add(5.0, event::PoseUpdate{});
  try {
    fold_event(script.state(), {2, 4.0, event::PoseUpdate{}});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::TimeRegression);
  }
}

TEST(Fold, EqualTimesAreFine) {
  Script script;
  script.add(5.0, event::PoseUpdate{});
  EXPECT_NO_THROW(script.add(5.0, event::PoseUpdate{}));
}

TEST(Fold, UnknownReferencesRejected) {
  const auto s = empty_state();
  auto code = [&](EventPayload p) {
    try {
      fold_event(s, {1, 0.0, std::move(p)});
    } catch (const Error& err) {
      return err.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code(event::Categorized{UtteranceId{9}, "A", "b", "A;b", {}}), ErrorCode::InvalidReference);
  EXPECT_EQ(code(event::TreeAdded{TreeId{1}, IslandId{1}, UtteranceId{1}, "x", TreeSlot::at(0)}),
            ErrorCode::InvalidReference);
  EXPECT_EQ(code(event::DiveIn{IslandId{3}, {}, {}}), ErrorCode::InvalidReference);
  EXPECT_EQ(code(event::InferenceError{UtteranceId{2}, "ProviderTimeout", ""}), ErrorCode::InvalidReference);
  EXPECT_EQ(code(event::UtteranceSubmitted{UtteranceId{1}, "   "}), ErrorCode::EmptyTranscript);
  EXPECT_EQ(code(event::DiveOut{IslandId{1}, {}, {}}), ErrorCode::NotImmersed);
}

TEST(Fold, DuplicateCategoryIslandRejected) {
  auto s = fold_event(empty_state(), island_created(1, 1, "Energy Saving"));
  try {
    fold_event(s, island_created(2, 2, "energy  SAVING"));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::InvalidReference);
  }
}

TEST(Fold, TreeMustMatchItsUtterancesCategory) {
  Script script;
  script.idea(0, "Energy Saving");
  script.idea(1, "Transportation");
  script.add(2, event::UtteranceSubmitted{UtteranceId{50}, "bikes"});
  script.add(2, event::Categorized{UtteranceId{50}, "Transportation", "bikes", "Transportation;bikes", {}});
  EXPECT_THROW(fold_event(script.state(), {script.state().last_seq + 1, 2,
                                           event::TreeAdded{TreeId{9}, IslandId{1}, UtteranceId{50}, "bikes",
                                                            TreeSlot::at(1)}}),
               Error);
}

TEST(Fold, OverflowOnlyWhenFull) {
  Script script;
  script.idea(0, "Energy Saving");
  script.add(1, event::UtteranceSubmitted{UtteranceId{50}, "lights"});
  script.add(1, event::Categorized{UtteranceId{50}, "Energy Saving", "lights", "Energy Saving;lights", {}});
  EXPECT_THROW(fold_event(script.state(), {script.state().last_seq + 1, 1,
                                           event::TreeAdded{TreeId{2}, IslandId{1}, UtteranceId{50}, "lights",
                                                            TreeSlot::overflow()}}),
               Error);
  EXPECT_THROW(fold_event(script.state(), {script.state().last_seq + 1, 1,
                                           event::TreeAdded{TreeId{2}, IslandId{1}, UtteranceId{50}, "lights",
                                                            TreeSlot::at(0)}}),
               Error);
}

TEST(Fold, NothingAfterSessionEnded) {
  Script script;
  script.add(1, event::SessionEnded{});
  EXPECT_TRUE(script.state().ended);
  try {
    fold_event(script.state(), {2, 2, event::PoseUpdate{}});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SessionClosed);
  }
}

TEST(Fold, UtteranceLocationIsModeAtSubmission) {
  Script script;
  script.idea(0, "Energy Saving");
  script.add(1, event::DiveIn{IslandId{1}, {}, {}});
  script.idea(2, "Transportation");
  EXPECT_EQ(script.state().utterances[0].location, Mode::overview());
  EXPECT_EQ(script.state().utterances[1].location, Mode::immersed(IslandId{1}));
}

// Random organizer-shaped streams with interleaved navigation.
class FoldProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(FoldProperties, DeterminismUniquenessSlots) {
  std::mt19937_64 rng(GetParam());
  Script script;
  std::uniform_int_distribution<int> category(0, 5), action(0, 9);
  double t = 0;
  for (int i = 0; i < 200; ++i) {
    t += 0.5;
    const int a = action(rng);
    const auto& s = script.state();
    if (a == 0 && s.mode().is_overview() && !s.islands.empty()) {
      script.add(t, event::DiveIn{s.islands[rng() % s.islands.size()].id, {}, {}});
    } else if (a == 1 && s.mode().is_immersed()) {
      script.add(t, event::DiveOut{s.mode().island(), {}, {}});
    } else {
      script.idea(t, testing_support::category_name(category(rng)));
    }
  }

  const auto again = fold_all(script.initial(), script.events());
  EXPECT_EQ(again, script.state());
  EXPECT_EQ(fold_all(script.initial(), script.events()), again);

  const auto& islands = script.state().islands;
  for (std::size_t i = 0; i < islands.size(); ++i)
    for (std::size_t j = i + 1; j < islands.size(); ++j) EXPECT_FALSE(islands[i].category == islands[j].category);

  for (const auto& island : islands) {
    std::vector<int> slots;
    for (const auto& tree : island.trees)
      if (!tree.slot.is_overflow()) slots.push_back(tree.slot.index());
    EXPECT_LE(slots.size(), 8u);
    std::sort(slots.begin(), slots.end());
    EXPECT_EQ(std::adjacent_find(slots.begin(), slots.end()), slots.end());
    for (int slot : slots) EXPECT_TRUE(slot >= 0 && slot < 8);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, FoldProperties, ::testing::Range<std::uint64_t>(1, 21));
