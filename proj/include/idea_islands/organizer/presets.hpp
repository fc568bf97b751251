#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "idea_islands/organizer/topic.hpp"

// Built-in ideation topics. data/topics/*.json carries the same content for
// editing; a test keeps the two in sync.
namespace idea_islands::organizer::presets {

inline constexpr std::string_view kTwoTopicPrefix = R"prompt(Your task is to categorize and summarize Korean transcripts about a campus innovation challenge.
Output must be a single-line string in the format: CATEGORY;SUMMARY
(CATEGORY and SUMMARY each in 1-3 words and 1-5 words, no extra explanation).

We have two main topics:
1) "Campus lounge/cafe communication" – how to foster everyday communication in an indoor lounge/cafe setting.
Example categories to consider (in Korean):
- Digital Interaction Tools
- Card & Board Tools
- Events & Workshops
- Collaborative Activities
- Content Sharing Activities
- Space & Environment
- Experience & Practice Activities
- Incentive & Reward Systems
(You may create a new category if none of the above apply.)
2) "Healthy living habits" – how to encourage students to adopt healthier daily routines.
Example categories to consider (in Korean):
- Nutrition Management
- Exercise Promotion
- Health Monitoring
- Rewards & Incentives
- Mental Health Care
- Health Education
- Digital Utilization
(You may create a new category if none of the above apply.)

Rules:
1. Do not invent content not in the transcript.
2. If the transcript fits an existing category from the provided list, use it rather than creating a new one.
3. Only create a new category if the idea is clearly different from all existing categories.
4. Summaries must be accurate and preserve the important content (1-5 words; average 3-4 words).
5. Do not create meaningless categories such as "Other" or "New usage".
6. Output must be "CATEGORY;SUMMARY".

Double-check:
- If the transcript's idea is already covered by an existing category, do NOT create a new one.
- Avoid subdividing categories too finely unless truly necessary.
- Use only the content that actually appears in the transcript (no extra details).)prompt";

inline constexpr std::string_view kSustainablePrefix = R"prompt(Your task is to categorize and summarize Korean transcripts about a campus innovation challenge.
Output must be a single-line string in the format: CATEGORY;SUMMARY
(CATEGORY and SUMMARY each in 1-3 words and 1-5 words, no extra explanation).

We have one main topic:
"Sustainable campus" – how to improve sustainability within a university campus setting.

Example categories to consider (in Korean):
- Energy Saving
- Resource & Waste Management
- Transportation & Mobility
- Space Design & Greening
- Eco-Friendly Diet
- Education & Campaign
- Digital Monitoring
(You may create a new category if none of the above apply.)

Rules:
1. Do not invent content not in the transcript.
2. If the transcript fits an existing category from the provided list, use it rather than creating a new one.
3. Only create a new category if the idea is clearly different from all existing categories.
4. Summaries must be accurate and preserve the important content (1-5 words; average 3-4 words).
5. Do not create meaningless categories such as "Other" or "New usage".
6. Output must be "CATEGORY;SUMMARY".

Double-check:
- If the transcript's idea is already covered by an existing category, do NOT create a new one.
- Avoid subdividing categories too finely unless truly necessary.
- Use only the content that actually appears in the transcript (no extra details).)prompt";

inline std::vector<FewShotExample> two_topic_examples() {
  return {
      {"Ideas to promote communication in campus indoor lounge/cafe",
       {"Events & Workshops", "Card & Board Tools"},
       "If we install a large touch screen in one corner of the lounge and hold weekly quiz events, I think conversations would naturally emerge.",
       "Digital Interaction Tools;touch screen quiz events"},
      {"Ideas to promote communication in campus indoor lounge/cafe",
       {"Events & Workshops", "Collaborative Activities"},
       "If we mix quiet spaces and open-type spaces half and half in the lounge, people could naturally chat or rest according to their preferences.",
       "Space & Environment;quiet zones and open zones combined"},
      {"Ways to encourage students' healthy living habits",
       {"Health Monitoring"},
       "How about using an app to listen to meditation sounds together when stressed and give feedback to each other?",
       "Mental Health Care;meditation app sharing for stress management"},
  };
}

inline std::vector<FewShotExample> sustainable_examples() {
  return {
      {"Creating sustainable campus environment",
       {"Resource & Waste Management", "Energy Saving"},
       "The problem is that classroom lights and air conditioners are left on after work hours. How about expanding night patrol staff?",
       "Energy Saving;night patrol waste prevention"},
      {"Creating sustainable campus environment",
       {"Energy Saving"},
       "If we visualize power and water usage by campus building in real-time and publish it on the web, I think people's conservation awareness would increase.",
       "Digital Monitoring;real-time resource usage disclosure"},
  };
}

inline std::vector<CategoryLabel> labels(std::initializer_list<std::string_view> names) {
  std::vector<CategoryLabel> out;
  for (auto n : names) out.emplace_back(n);
  return out;
}

inline TopicConfig study1_communication() {
  return TopicConfig{"study1-communication",
                     "Campus lounge/cafe communication",
                     std::string(kTwoTopicPrefix),
                     labels({"Digital Interaction Tools", "Card & Board Tools", "Events & Workshops", "Collaborative Activities", "Content Sharing Activities", "Space & Environment", "Experience & Practice Activities", "Incentive & Reward Systems"}),
                     two_topic_examples()};
}

inline TopicConfig study1_health() {
  return TopicConfig{"study1-health",
                     "Healthy living habits",
                     std::string(kTwoTopicPrefix),
                     labels({"Nutrition Management", "Exercise Promotion", "Health Monitoring", "Rewards & Incentives", "Mental Health Care", "Health Education", "Digital Utilization"}),
                     two_topic_examples()};
}

inline TopicConfig study2_sustainability() {
  return TopicConfig{"study2-sustainability",
                     "Sustainable campus",
                     std::string(kSustainablePrefix),
                     labels({"Energy Saving", "Resource & Waste Management", "Transportation & Mobility", "Space Design & Greening", "Eco-Friendly Diet", "Education & Campaign", "Digital Monitoring"}),
                     sustainable_examples()};
}

inline std::vector<TopicConfig> all() { return {study1_communication(), study1_health(), study2_sustainability()}; }

// Throws InvalidArgument for an unknown id.
inline TopicConfig by_id(std::string_view id) {
  for (auto& t : all())
    if (t.id == id) return t;
  throw Error(ErrorCode::InvalidArgument, "unknown topic preset: " + std::string(id));
}

}  // namespace idea_islands::organizer::presets
