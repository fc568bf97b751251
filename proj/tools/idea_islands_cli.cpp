// idea-islands: serve | replay | report | synth

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "idea_islands/idea_islands.hpp"
#include "idea_islands/organizer/provider_http.hpp"
#include "idea_islands/service/server.hpp"

namespace ii = idea_islands;

namespace {

// Exit status per failure class.
int exit_code(ii::ErrorCode code) {
  switch (code) {
    case ii::ErrorCode::InvalidArgument: return 3;
    case ii::ErrorCode::StorageFailure: return 4;
    case ii::ErrorCode::CorruptLine: return 5;
    default: return 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ii::Error(ii::ErrorCode::InvalidArgument, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content) || !out.flush())
    throw ii::Error(ii::ErrorCode::StorageFailure, "cannot write " + path);
}

ii::organizer::TopicConfig resolve_topic(const std::string& name) {
  if (std::filesystem::exists(name)) return ii::organizer::load_topic_file(name);
  return ii::organizer::presets::by_id(name);
}

ii::TransitionMode resolve_transition(const std::string& name) {
  return ii::session_log::codec::transition(nlohmann::json(name));
}

std::string summary(const ii::SceneState& s) {
  std::ostringstream out;
  out << "topic=" << s.topic_config_id << "\n"
      << "events=" << s.last_seq << "\n"
      << "ended=" << (s.ended ? "true" : "false") << "\n"
      << "islands=" << s.islands.size() << "\n";
  for (const auto& island : s.islands) {
    std::size_t overflow = 0;
    for (const auto& t : island.trees) overflow += t.slot.is_overflow() ? 1 : 0;
    out << "  " << island.id.str() << " \"" << island.category.display() << "\" trees=" << island.trees.size()
        << " overflow=" << overflow << "\n";
  }
  std::size_t failed = 0;
  for (const auto& u : s.utterances) failed += u.status == ii::IdeaStatus::Failed ? 1 : 0;
  out << "utterances=" << s.utterances.size() << " failed=" << failed << "\n"
      << "mode=" << (s.mode().is_overview() ? std::string("overview") : s.mode().island().str()) << "\n";
  return out.str();
}

struct ServeArgs {
  std::string listen = "127.0.0.1:8080";
  std::string provider = "mock";
  std::vector<std::string> topics;
  std::string mock_table;
  std::string log_dir;
  std::string params;
  std::string transition = "dive";
  int io_threads = 2;
  std::size_t inference_threads = 4;
};

std::sig_atomic_t volatile g_stop = 0;

int serve(const ServeArgs& a) {
  auto config = ii::service::ServiceConfig::with_presets();
  if (!a.topics.empty()) {
    for (const auto& name : a.topics) {
      auto topic = resolve_topic(name);
      config.topics[topic.id] = topic;
    }
    config.default_topic = resolve_topic(a.topics.front()).id;
  }
  if (!a.params.empty()) config.layout = ii::layout::load_config_file(a.params);
  config.transition = resolve_transition(a.transition);
  if (!a.log_dir.empty()) config.log_dir = a.log_dir;
  config.inference_threads = a.inference_threads;

  std::shared_ptr<ii::organizer::InferenceProvider> provider;
  if (a.provider == "mock") {
    auto table = a.mock_table.empty() ? ii::organizer::keyword_table_for(config.topics.at(config.default_topic))
                                      : ii::organizer::parse_keyword_table(read_file(a.mock_table));
    provider = std::make_shared<ii::organizer::MockProvider>(std::move(table));
  } else {
    ii::organizer::HttpProviderConfig http;
    if (const char* v = std::getenv("IDEA_ISLANDS_LLM_URL")) http.base_url = v;
    if (const char* v = std::getenv("IDEA_ISLANDS_LLM_PATH")) http.path = v;
    if (const char* v = std::getenv("IDEA_ISLANDS_LLM_MODEL")) http.model = v;
    if (const char* v = std::getenv("OPENAI_API_KEY")) http.api_key = v;
    provider = std::make_shared<ii::organizer::HttpChatProvider>(http);
  }

  const auto colon = a.listen.rfind(':');
  if (colon == std::string::npos) throw ii::Error(ii::ErrorCode::InvalidArgument, "--listen wants host:port");
  const std::string host = a.listen.substr(0, colon);
  const int port = std::stoi(a.listen.substr(colon + 1));

  ii::service::SessionManager manager(config, provider);
  ii::service::Server server(manager, host, static_cast<unsigned short>(port));
  server.start(a.io_threads);
  std::cerr << "listening on " << host << ":" << server.port() << " (provider " << provider->name() << ")\n";

  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

int replay(const std::string& log, const std::string& snapshot_out, bool tolerant) {
  ii::SceneState final_state;
  if (std::filesystem::exists(log) && std::filesystem::file_size(log) == 0) {
    final_state = ii::SceneState::initial("", ii::LayoutParams{}, ii::TransitionMode::Dive);
  } else {
    auto result = ii::session_log::replay(log, {}, {tolerant});
    if (result.corrupt_line) std::cerr << "stopped at corrupt line " << *result.corrupt_line << "\n";
    final_state = std::move(result.final_state);
  }
  std::cout << summary(final_state);
  if (!snapshot_out.empty()) write_file(snapshot_out, ii::session_log::to_json(final_state).dump(2) + "\n");
  return 0;
}

int report(const std::string& log, const std::string& out, const std::string& originality_csv) {
  const auto loaded = ii::session_log::load(log);
  ii::metrics::OriginalityAnnotations originality;
  if (!originality_csv.empty()) originality = ii::metrics::parse_originality_csv(read_file(originality_csv));
  const auto r = ii::metrics::report_from_log(loaded.header.initial_state(), loaded.events, originality);
  std::cout << ii::metrics::format_text(r);
  if (!out.empty()) write_file(out, ii::metrics::to_json(r).dump(2) + "\n");
  return 0;
}

struct SynthArgs {
  ii::synth::Params params;
  std::optional<std::size_t> matched;
  std::optional<double> overview_seconds;
  std::string sequence;
  std::string topic = "study2-sustainability";
  std::string transition = "dive";
  std::string layout;
  std::string out;
};

int synth(SynthArgs a) {
  auto& p = a.params;
  p.matched = a.matched;
  p.overview_seconds = a.overview_seconds;
  p.topic = resolve_topic(a.topic);
  p.transition = resolve_transition(a.transition);
  if (!a.layout.empty()) p.layout = ii::layout::load_config_file(a.layout);
  if (!a.sequence.empty()) {
    std::stringstream in(a.sequence);
    for (std::string item; std::getline(in, item, ',');) p.sequence.push_back(item);
    p.ideas = p.sequence.size();
  }
  const auto result = ii::synth::generate(p, std::filesystem::path(a.out));
  std::cout << "wrote " << a.out << " (" << result.events.size() << " events, "
            << result.final_state.utterances.size() << " ideas, " << result.final_state.islands.size()
            << " islands)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Idea Islands session engine"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/websocket session service");
  serve_cmd->add_option("--listen", serve_args.listen, "host:port (port 0 picks a free one)");
  serve_cmd->add_option("--provider", serve_args.provider, "mock or live")->check(CLI::IsMember({"mock", "live"}));
  serve_cmd->add_option("--topic", serve_args.topics, "preset id or topic JSON file; the first is the default");
  serve_cmd->add_option("--mock-table", serve_args.mock_table, "keyword table (TSV) for the mock provider")
      ->check(CLI::ExistingFile);
  serve_cmd->add_option("--log-dir", serve_args.log_dir, "directory for session logs");
  serve_cmd->add_option("--params", serve_args.params, "layout params file (key=value)")->check(CLI::ExistingFile);
  serve_cmd->add_option("--transition", serve_args.transition, "walk or dive")->check(CLI::IsMember({"walk", "dive"}));
  serve_cmd->add_option("--io-threads", serve_args.io_threads)->check(CLI::PositiveNumber);
  serve_cmd->add_option("--inference-threads", serve_args.inference_threads)->check(CLI::PositiveNumber);

  std::string log, snapshot, out, originality;
  bool tolerant = false;
  auto* replay_cmd = app.add_subcommand("replay", "Fold a session log and print the final landscape");
  replay_cmd->add_option("--log", log, "session log")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--snapshot", snapshot, "write the final SceneState as JSON");
  replay_cmd->add_flag("--tolerant", tolerant, "stop at the first corrupt line instead of failing");

  auto* report_cmd = app.add_subcommand("report", "Compute ideation metrics for a session log");
  report_cmd->add_option("--log", log, "session log")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", out, "write the report as JSON");
  report_cmd->add_option("--originality", originality, "CSV of utterance,score")->check(CLI::ExistingFile);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic session log");
  synth_cmd->add_option("--out", synth_args.out, "log file to write")->required();
  synth_cmd->add_option("--ideas", synth_args.params.ideas);
  synth_cmd->add_option("--in-island", synth_args.params.in_island, "ideas spoken while immersed");
  synth_cmd->add_option("--matched", synth_args.matched, "in-island ideas matching the island (default all)");
  synth_cmd->add_option("--categories", synth_args.params.categories);
  synth_cmd->add_option("--duration", synth_args.params.duration, "session seconds");
  synth_cmd->add_option("--overview-seconds", synth_args.overview_seconds);
  synth_cmd->add_option("--sequence", synth_args.sequence, "comma-separated categories, all spoken in overview");
  synth_cmd->add_option("--seed", synth_args.params.seed);
  synth_cmd->add_option("--topic", synth_args.topic, "preset id or topic JSON file");
  synth_cmd->add_option("--transition", synth_args.transition)->check(CLI::IsMember({"walk", "dive"}));
  synth_cmd->add_option("--params", synth_args.layout, "layout params file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(serve_args);
    if (*replay_cmd) return replay(log, snapshot, tolerant);
    if (*report_cmd) return report(log, out, originality);
    if (*synth_cmd) return synth(std::move(synth_args));
  } catch (const ii::Error& err) {
    std::cerr << "idea-islands: " << err.what() << "\n";
    return exit_code(err.code());
  } catch (const std::exception& ex) {
    std::cerr << "idea-islands: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
