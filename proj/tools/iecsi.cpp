#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"
#include "iecsi/errors.hpp"
#include "iecsi/knowledge_gain.hpp"
#include "iecsi/qualitative.hpp"
#include "iecsi/report.hpp"
#include "iecsi/service.hpp"
#include "iecsi/storage.hpp"
#include "iecsi/synth.hpp"

namespace fs = std::filesystem;
using namespace iecsi;

namespace {

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsage = 2;
constexpr int kGate = 3;

int fail(int code, const std::string& message) {
  std::cerr << "error: " << message << '\n';
  return code;
}

int report_load_error(const std::exception& e) {
  if (auto* v = dynamic_cast<const ValidationError*>(&e)) {
    std::cerr << "error: study is invalid\n";
    for (const auto& line : v->violations()) std::cerr << "  " << line << '\n';
    return kDataError;
  }
  return fail(kDataError, e.what());
}

std::string kappa_text(const std::optional<double>& k) {
  if (!k) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *k);
  return buf;
}

int cmd_validate(const std::string& dir) {
  if (!fs::is_directory(dir)) return fail(kUsage, "study directory not found: " + dir);
  try {
    const Study study = load_study(dir);
    std::cout << "ok: " << study.design.study_id << ", " << study.sessions.size()
              << " sessions\n";
    return kOk;
  } catch (const std::exception& e) {
    return report_load_error(e);
  }
}

int cmd_analyze(const std::string& dir, const std::string& out, const std::string& format) {
  if (!fs::is_directory(dir)) return fail(kUsage, "study directory not found: " + dir);
  Study study;
  try {
    study = load_study(dir);
  } catch (const std::exception& e) {
    return report_load_error(e);
  }
  try {
    const AnalysisReport report = analyze(study);
    const std::string text = render(
        report, format == "markdown" ? ReportFormat::Markdown : ReportFormat::Structured);
    if (out.empty() || out == "-") {
      std::cout << text;
    } else {
      std::ofstream f(out, std::ios::binary | std::ios::trunc);
      f << text;
      if (!f) return fail(kDataError, "cannot write " + out);
    }
    return kOk;
  } catch (const GateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kGate;
  } catch (const std::exception& e) {
    return report_load_error(e);
  }
}

int cmd_kappa(const std::string& dir) {
  if (!fs::is_directory(dir)) return fail(kUsage, "study directory not found: " + dir);
  Study study;
  try {
    study = load_study(dir);
  } catch (const std::exception& e) {
    return report_load_error(e);
  }
  int code = kOk;
  const StudyAgreement a = summary_agreement(study.sessions, study.design.analysis);
  std::cout << "summary ratings:";
  if (!a.sufficient) {
    std::cout << " insufficient annotators\n";
    code = kDataError;
  } else {
    std::cout << " " << a.doubly_rated << " doubly rated summaries\n";
    for (const auto& dim : {"dqual", "dintrp", "dcrit"}) {
      const auto& d = a.dimensions.at(dim);
      std::cout << "  " << dim << " kappa=" << kappa_text(d.kappa)
                << (d.passes ? " accept" : " re-annotate") << '\n';
    }
  }
  std::cout << "annotations:";
  std::set<std::string> annotators;
  for (const auto& x : study.annotations) annotators.insert(x.annotator_id);
  if (study.annotations.empty()) {
    std::cout << " none\n";
    return code;
  }
  if (annotators.size() < 2) {
    std::cout << " insufficient annotators\n";
    return code;
  }
  const std::string first = *annotators.begin();
  const std::string second = *std::next(annotators.begin());
  std::map<std::pair<std::string, std::string>, std::string> by_first, by_second;
  for (const auto& x : study.annotations) {
    if (x.annotator_id == first) by_first[{x.condition_id, x.target_id}] = x.sentiment;
    if (x.annotator_id == second) by_second[{x.condition_id, x.target_id}] = x.sentiment;
  }
  std::vector<std::string> xa, xb;
  for (const auto& [key, s] : by_first) {
    if (auto it = by_second.find(key); it != by_second.end()) {
      xa.push_back(s);
      xb.push_back(it->second);
    }
  }
  if (xa.empty()) {
    std::cout << " insufficient annotators\n";
    return code;
  }
  std::optional<double> k;
  try {
    k = cohen_kappa(xa, xb);
  } catch (const DomainError&) {
  }
  std::cout << " " << xa.size() << " paired targets\n  sentiment kappa=" << kappa_text(k)
            << '\n';
  return code;
}

int cmd_synth(int n, const std::string& mode, double effect, std::uint64_t seed,
              const std::string& out) {
  if (n < 2) return fail(kUsage, "--participants must be at least 2");
  SynthOptions o;
  o.participants = n;
  o.mode = mode == "benchmark" ? StudyMode::BenchmarkOnly : StudyMode::Comparative;
  o.effect = effect;
  o.seed = seed;
  try {
    write_study(synthesize(o), out);
    std::cout << "wrote " << out << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return report_load_error(e);
  }
}

int cmd_serve(const std::string& addr, const std::string& data) {
  const auto colon = addr.rfind(':');
  int port = -1;
  if (colon != std::string::npos && colon > 0) {
    try {
      std::size_t used = 0;
      port = std::stoi(addr.substr(colon + 1), &used);
      if (used != addr.size() - colon - 1) port = -1;
    } catch (const std::exception&) {
      port = -1;
    }
  }
  if (port < 0 || port > 65535) return fail(kDataError, "bad address " + addr);
  const std::string host = addr.substr(0, colon);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::unique_ptr<Service> service;
  try {
    service = std::make_unique<Service>(data);
  } catch (const std::exception& e) {
    return fail(kDataError, e.what());
  }
  if (!service->bind(host, port)) return fail(kDataError, "cannot bind " + addr);
  for (const auto& id : service->store().list()) {
    std::cout << "researcher token " << id << ' ' << service->issue_researcher_token(id) << '\n';
  }
  std::cout << "listening on " << host << ':' << service->port() << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service->stop();
  });
  const bool ok = service->run();
  if (!ok) {
    // Wake the waiter so it can exit.
    pthread_kill(waiter.native_handle(), SIGTERM);
  }
  waiter.join();
  service->store().flush_journal();
  std::cout << "shutdown" << std::endl;
  return ok ? kOk : kDataError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation toolkit for conversational search user studies"};
  app.require_subcommand(1);

  std::string dir;
  auto* validate = app.add_subcommand("validate", "Load and validate a study directory");
  validate->add_option("study-dir", dir)->required();

  std::string out;
  std::string format = "structured";
  auto* analyze_cmd = app.add_subcommand("analyze", "Run the full analysis and write a report");
  analyze_cmd->add_option("study-dir", dir)->required();
  analyze_cmd->add_option("--out", out, "Report path (stdout when omitted)");
  analyze_cmd->add_option("--format", format)->check(CLI::IsMember({"structured", "markdown"}));

  auto* kappa = app.add_subcommand("kappa", "Inter-rater agreement for ratings and annotations");
  kappa->add_option("study-dir", dir)->required();

  int participants = 0;
  std::string mode = "comparative";
  double effect = 0.0;
  std::uint64_t seed = 1;
  auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic study");
  synth->add_option("--participants", participants)->required();
  synth->add_option("--mode", mode)->check(CLI::IsMember({"comparative", "benchmark"}));
  synth->add_option("--effect", effect);
  synth->add_option("--seed", seed);
  synth->add_option("--out", out)->required();

  std::string addr;
  std::string data;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API over a store root");
  serve->add_option("--addr", addr, "host:port")->required();
  serve->add_option("--data", data, "Store root directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (validate->parsed()) return cmd_validate(dir);
  if (analyze_cmd->parsed()) return cmd_analyze(dir, out, format);
  if (kappa->parsed()) return cmd_kappa(dir);
  if (synth->parsed()) return cmd_synth(participants, mode, effect, seed, out);
  if (serve->parsed()) return cmd_serve(addr, data);
  return kUsage;
}
