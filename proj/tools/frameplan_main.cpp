#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "frameplan/bundle.hpp"
#include "frameplan/codegen.hpp"
#include "frameplan/error.hpp"
#include "frameplan/judge.hpp"
#include "frameplan/service/api_server.hpp"
#include "frameplan/service/replay.hpp"

namespace {

using namespace frameplan;

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kValidation = 3, kProvider = 4 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
    case ErrorCode::BadRequest: return kParse;
    case ErrorCode::ProviderError:
    case ErrorCode::TranscriptMissing:
    case ErrorCode::MissingInstructionMarker:
    case ErrorCode::MissingResponseMarker:
    case ErrorCode::UnparseableClass:
    case ErrorCode::UnparseableDelta:
    case ErrorCode::UnknownName:
    case ErrorCode::UnparseableList:
    case ErrorCode::BadChangeNeeded:
    case ErrorCode::UnknownPrimitive:
    case ErrorCode::ArityError:
    case ErrorCode::UnparseableCall: return kProvider;
    case ErrorCode::IoError:
    case ErrorCode::NotFound: return kFailure;
    default: return kValidation;
  }
}

struct ProviderFlags {
  std::string mode = "mock";
  std::string transcriptDir;
  std::string endpoint = llm::ProviderConfig{}.endpoint;
  std::string model = llm::ProviderConfig{}.model;
  double timeout = 60.0;
  int retries = 2;

  void attach(CLI::App& app) {
    app.add_option("--provider", mode, "Model provider")->envname("PROVIDER_MODE")->check(CLI::IsMember({"live", "mock"}));
    app.add_option("--transcript-dir", transcriptDir, "Mock transcripts (<kind>/<digest>.txt)")->envname("TRANSCRIPT_DIR");
    app.add_option("--endpoint", endpoint, "Chat-completions endpoint for the live provider");
    app.add_option("--model", model, "Model name for the live provider");
    app.add_option("--timeout", timeout, "Per-request timeout in seconds");
    app.add_option("--retries", retries, "Retries after a failed request");
  }

  std::shared_ptr<llm::Provider> make() const {
    if (mode == "live") {
      llm::ProviderConfig config;
      config.endpoint = endpoint;
      config.model = model;
      config.timeoutSeconds = timeout;
      config.maxRetries = retries;
      return std::make_shared<llm::HttpProvider>(config);
    }
    if (transcriptDir.empty()) return std::make_shared<llm::MockProvider>();
    return std::make_shared<llm::MockProvider>(transcriptDir);
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path, path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_report(const judge::ErrorReport& report) {
  // Indices in the report count changes; step k of a timeline is change k - 1.
  std::cout << "missing " << report.missing_count() << ", extraneous " << report.extraneous_count()
            << ", inefficient " << report.inefficient_count() << '\n';
  std::cout << judge::to_json(report).dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frameplan: author robot instructions as timelines of scene edits"};
  app.require_subcommand(1);

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string bundleDir = "bundles";
  std::string dataDir = "data";
  bool noCaption = false;
  ProviderFlags serveProvider;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--host", host, "Bind address")->envname("HOST");
  serve->add_option("--port", port, "Bind port")->envname("PORT");
  serve->add_option("--bundle-dir", bundleDir, "Directory of environment bundles");
  serve->add_option("--data-dir", dataDir, "Where session archives are saved");
  serve->add_flag("--no-auto-caption", noCaption, "Leave drag steps uncaptioned");
  serveProvider.attach(*serve);

  std::string script;
  std::string bundlePath;
  std::string output;
  service::ReplayOptions replayOptions;
  ProviderFlags replayProvider;
  auto* replay = app.add_subcommand("replay", "Run a scripted event list and write a session archive");
  replay->add_option("script", script, "Event script")->required();
  replay->add_option("bundle", bundlePath, "Bundle directory")->required();
  replay->add_option("-o,--output", output, "Archive path (default: stdout)");
  replay->add_flag("--caption", replayOptions.caption, "Caption drag steps through the provider");
  replay->add_flag("--oracle", replayOptions.oracle, "Mark the archive as an oracle");
  replayProvider.attach(*replay);

  std::string sessionPath;
  std::string oraclePath;
  auto* judgeCmd = app.add_subcommand("judge", "Compare a session archive against an oracle archive");
  judgeCmd->add_option("session", sessionPath, "Participant archive")->required();
  judgeCmd->add_option("oracle", oraclePath, "Oracle archive")->required();

  std::string codegenPath;
  std::string path = "rule";
  bool showReport = false;
  ProviderFlags codegenProvider;
  auto* codegenCmd = app.add_subcommand("codegen", "Translate a session archive into a policy program");
  codegenCmd->add_option("session", codegenPath, "Session archive")->required();
  codegenCmd->add_option("--path", path, "Translation path")->check(CLI::IsMember({"rule", "llm"}));
  codegenCmd->add_flag("--report", showReport, "Print validation findings to stderr");
  codegenProvider.attach(*codegenCmd);

  std::string validatePath;
  auto* validate = app.add_subcommand("validate", "Check a bundle against the environment schema");
  validate->add_option("bundle", validatePath, "Bundle directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      service::ServiceOptions options{dataDir, !noCaption};
      auto svc = std::make_shared<service::SessionService>(BundleCatalog(bundleDir), serveProvider.make(), options);
      service::ApiServer server(svc);
      std::cerr << "frameplan: " << svc->catalog().ids().size() << " bundle(s), provider " << svc->provider().name()
                << ", listening on " << host << ':' << port << '\n';
      if (!server.listen(host, port)) {
        std::cerr << "frameplan: cannot bind " << host << ':' << port << '\n';
        return kFailure;
      }
      return kOk;
    }
    if (replay->parsed()) {
      const auto bundle = load_bundle(bundlePath);
      auto result = service::run_replay(parse_document(read_file(script), script), bundle, replayProvider.make(),
                                        replayOptions);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      if (output.empty()) {
        std::cout << service::serialize_archive(result.archive).dump(2) << '\n';
      } else {
        service::write_archive(output, result.archive);
        std::cerr << "wrote " << output << " (" << result.archive.timeline.size() << " steps)\n";
      }
      return kOk;
    }
    if (judgeCmd->parsed()) {
      const auto participant = service::read_archive(sessionPath);
      const auto oracle = service::read_archive(oraclePath);
      if (participant.timeline.environment() != oracle.timeline.environment()) {
        throw Error(ErrorCode::EnvironmentMismatch, "session and oracle use different environments");
      }
      print_report(judge::judge_sequences(participant.timeline.environment(), service::archive_states(participant),
                                          service::archive_states(oracle)));
      return kOk;
    }
    if (codegenCmd->parsed()) {
      const auto archive = service::read_archive(codegenPath);
      const auto states = service::archive_states(archive);
      const auto& env = archive.timeline.environment();
      const auto program = path == "rule" ? codegen::translate_rule_based(archive.timeline)
                                          : codegen::translate_with_model(*codegenProvider.make(), env, states);
      std::cout << codegen::emit(program);
      if (showReport) {
        for (const auto& issue : codegen::validate_program(env, states, program)) {
          std::cerr << "call " << issue.callIndex << ": " << codegen::to_string(issue.kind) << ": " << issue.message
                    << '\n';
        }
      }
      return kOk;
    }
    if (validate->parsed()) {
      const auto bundle = load_bundle(validatePath);
      auto violations = validate_environment(*bundle.environment);
      for (const auto& v : validate_state(*bundle.environment, bundle.initialState)) violations.push_back(v);
      for (const auto& v : violations) std::cout << v.code << ' ' << v.path << ": " << v.message << '\n';
      if (!violations.empty()) return kValidation;
      std::cout << bundle.id << ": ok (" << bundle.environment->objects.size() << " objects, "
                << bundle.environment->fixtures.size() << " fixtures)\n";
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "frameplan: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "frameplan: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
