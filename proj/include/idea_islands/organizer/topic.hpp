#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "idea_islands/core/category.hpp"

namespace idea_islands::organizer {

struct FewShotExample {
  std::string topic;
  std::vector<std::string> categories;
  std::string transcript;
  std::string output;

  friend bool operator==(const FewShotExample&, const FewShotExample&) = default;
};

struct TopicConfig {
  std::string id;
  std::string topic_name;
  std::string prefix_rules;
  std::vector<CategoryLabel> seed_categories;
  std::vector<FewShotExample> few_shot_examples;

  void validate() const {
    if (few_shot_examples.empty())
      throw Error(ErrorCode::InvalidArgument, "topic " + id + " needs at least one few-shot example");
    for (std::size_t i = 0; i < seed_categories.size(); ++i)
      for (std::size_t j = i + 1; j < seed_categories.size(); ++j)
        if (seed_categories[i] == seed_categories[j])
          throw Error(ErrorCode::InvalidArgument, "duplicate seed category " + seed_categories[j].display());
  }

  friend bool operator==(const TopicConfig&, const TopicConfig&) = default;
};

inline nlohmann::json to_json(const TopicConfig& t) {
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& c : t.seed_categories) seeds.push_back(c.display());
  nlohmann::json examples = nlohmann::json::array();
  for (const auto& e : t.few_shot_examples)
    examples.push_back({{"topic", e.topic},
                        {"categories", e.categories},
                        {"transcript", e.transcript},
                        {"output", e.output}});
  return {{"id", t.id},
          {"topic_name", t.topic_name},
          {"prefix_rules", t.prefix_rules},
          {"seed_categories", seeds},
          {"few_shot_examples", examples}};
}

inline TopicConfig topic_from_json(const nlohmann::json& j) {
  try {
    TopicConfig t;
    t.id = j.at("id").get<std::string>();
    t.topic_name = j.at("topic_name").get<std::string>();
    t.prefix_rules = j.at("prefix_rules").get<std::string>();
    for (const auto& c : j.at("seed_categories")) t.seed_categories.emplace_back(c.get<std::string>());
    for (const auto& e : j.at("few_shot_examples"))
      t.few_shot_examples.push_back({e.at("topic").get<std::string>(),
                                     e.at("categories").get<std::vector<std::string>>(),
                                     e.at("transcript").get<std::string>(),
                                     e.at("output").get<std::string>()});
    t.validate();
    return t;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidArgument, std::string("topic config: ") + ex.what());
  }
}

inline TopicConfig load_topic_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open topic config " + path);
  try {
    return topic_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + ex.what());
  }
}

}  // namespace idea_islands::organizer
