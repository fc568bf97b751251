// Runs a short scripted session in-process with the keyword mock provider and
// prints the landscape and metrics. No network, no log file.

#include <iostream>

#include "idea_islands/idea_islands.hpp"

using namespace idea_islands;

int main() {
  service::SessionConfig config;
  config.topic = organizer::presets::study2_sustainability();
  config.transition = TransitionMode::Walk;

  double now = 0;
  auto provider = std::make_shared<organizer::MockProvider>(organizer::KeywordTable{
      {"solar", {"Energy Saving", "{keyword} panels on roofs"}},
      {"compost", {"Resource & Waste Management", "{keyword} bins by cafeteria"}},
      {"bike", {"Transportation", "{keyword} sharing stations"}},
  });
  auto session = service::Session::create(config, provider, [&now] { return now; });
  session->subscribe([](const service::ServerMessage& m) {
    if (const auto* d = m.as<service::msg::SceneDelta>())
      for (const auto& ev : d->events) std::cout << "  seq " << ev.seq << " " << to_string(ev.kind()) << "\n";
  });

  auto send = [&](double t, service::ClientMessage m) {
    now = t;
    session->handle(m);
  };
  send(5, {service::msg::SubmitUtterance{"Put solar panels on the library roof"}});
  send(20, {service::msg::SubmitUtterance{"Compost food scraps from the cafeteria"}});
  send(40, {service::msg::SubmitUtterance{"A bike sharing program between dorms"}});
  send(60, {service::msg::DiveIn{IslandId{1}}});
  send(75, {service::msg::SubmitUtterance{"Solar chargers at outdoor benches"}});

  const auto nav = session->nav_state();
  const auto scene = session->snapshot();
  std::cout << "orbs around " << scene.mode().island().str() << ":\n";
  for (const auto& orb : scene.orbs)
    std::cout << "  " << orb.target.str() << " at (" << orb.position.x << ", " << orb.position.y << ")\n";
  std::cout << "signposts in view: " << navigation::visible_signposts(scene, nav.user).size() << "\n";

  send(120, {service::msg::EndSession{}});
  std::cout << metrics::format_text(session->metrics());
}
