#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "http_server.hpp"
#include "mcsg/mcsg.h"

namespace {

struct BuildFlags {
  std::string data;
  std::string similarity = "pearson";
  double tau = 0.7;
  std::uint64_t seed = 42;
  int max_depth = 3;
  int min_split_size = 4;
};

void add_build_flags(CLI::App* cmd, BuildFlags& f) {
  cmd->add_option("--data", f.data, "Dataset container (.json)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--similarity", f.similarity, "Similarity measure")
      ->check(CLI::IsMember({"pearson", "cosine"}));
  cmd->add_option("--tau", f.tau, "Edge threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", f.seed, "Community detection seed");
  cmd->add_option("--max-depth", f.max_depth, "Maximum hierarchy depth")->check(CLI::PositiveNumber);
  cmd->add_option("--min-split-size", f.min_split_size, "Smallest community that is split further")
      ->check(CLI::PositiveNumber);
}

mcsg_build_config to_config(const BuildFlags& f) {
  mcsg_build_config c;
  mcsg_build_config_default(&c);
  c.similarity = f.similarity == "cosine" ? MCSG_COSINE : MCSG_PEARSON;
  c.tau = f.tau;
  c.seed = f.seed;
  c.max_depth = f.max_depth;
  c.min_split_size = f.min_split_size;
  return c;
}

int report(mcsg_status status, const std::string& what) {
  std::cerr << "mcsg: " << what << ": " << mcsg_status_name(status) << ": " << mcsg_last_error() << "\n";
  return 1;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_output(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

struct Session {
  mcsg_dataset* dataset = nullptr;
  mcsg_session* session = nullptr;
  ~Session() {
    mcsg_session_free(session);
    mcsg_dataset_free(dataset);
  }
};

int open_session(const BuildFlags& f, const std::string& import_path, Session& s) {
  if (auto st = mcsg_dataset_load(f.data.c_str(), &s.dataset); st != MCSG_OK)
    return report(st, "loading " + f.data);
  if (!import_path.empty()) {
    std::string doc;
    if (!read_file(import_path, doc)) {
      std::cerr << "mcsg: cannot read " << import_path << "\n";
      return 1;
    }
    if (auto st = mcsg_session_create_imported(s.dataset, doc.c_str(), &s.session); st != MCSG_OK)
      return report(st, "importing " + import_path);
    return 0;
  }
  const auto config = to_config(f);
  if (auto st = mcsg_session_create(s.dataset, &config, &s.session); st != MCSG_OK)
    return report(st, "building graph");
  return 0;
}

int serve(const BuildFlags& f, const std::string& import_path, const std::string& host, int port) {
  // Termination signals are taken by a dedicated thread so the server can be
  // stopped outside signal-handler context.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Session s;
  if (int rc = open_session(f, import_path, s)) return rc;
  mcsg::tools::HttpServer server(s.session);
  int bound = 0;
  try {
    bound = server.bind(host, port);
  } catch (const std::exception& e) {
    std::cerr << "mcsg: " << e.what() << "\n";
    return 1;
  }
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  std::cerr << "mcsg: serving " << mcsg_dataset_channel_count(s.dataset) << " channels on http://" << host
            << ":" << bound << "\n";
  const bool ok = server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass channel similarity graph engine"};
  app.require_subcommand(1);

  BuildFlags serve_flags;
  std::string import_path, host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API for one dataset");
  add_build_flags(serve_cmd, serve_flags);
  serve_cmd->add_option("--port", port, "TCP port (0 picks a free port)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host, "Interface to bind");
  serve_cmd->add_option("--import", import_path, "Start from an exported graph")->check(CLI::ExistingFile);

  BuildFlags export_flags;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export", "Build the graph and write the JSON document");
  add_build_flags(export_cmd, export_flags);
  export_cmd->add_option("-o,--output", export_out, "Output file (default stdout)");

  BuildFlags qgp_flags;
  std::string qgp_import, qgp_out;
  auto* qgp_cmd = app.add_subcommand("qgp", "Write per-node graph statistics as CSV");
  add_build_flags(qgp_cmd, qgp_flags);
  qgp_cmd->add_option("--import", qgp_import, "Use an exported graph")->check(CLI::ExistingFile);
  qgp_cmd->add_option("-o,--output", qgp_out, "Output file (default stdout)");

  double noise = 0.05;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  bool sidecar = false;
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted-pattern synthetic dataset");
  synth_cmd->add_option("--noise", noise, "Gaussian noise level")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth_seed, "Generator seed");
  synth_cmd->add_option("-o,--output", synth_out, "Output container (.json)")->required();
  synth_cmd->add_flag("--sidecar", sidecar, "Store intensities in a binary sidecar");

  CLI11_PARSE(app, argc, argv);

  if (*serve_cmd) return serve(serve_flags, import_path, host, port);

  if (*export_cmd || *qgp_cmd) {
    const bool is_export = export_cmd->parsed();
    Session s;
    if (int rc = open_session(is_export ? export_flags : qgp_flags, is_export ? "" : qgp_import, s)) return rc;
    char* text = nullptr;
    const auto st = is_export ? mcsg_session_export(s.session, &text) : mcsg_session_qgp_csv(s.session, &text);
    if (st != MCSG_OK) return report(st, is_export ? "export" : "qgp");
    const std::string& out = is_export ? export_out : qgp_out;
    const bool ok = write_output(out, text);
    mcsg_string_free(text);
    if (!ok) {
      std::cerr << "mcsg: cannot write " << out << "\n";
      return 1;
    }
    return 0;
  }

  mcsg_dataset* ds = nullptr;
  if (auto st = mcsg_dataset_synthetic(noise, synth_seed, &ds); st != MCSG_OK) return report(st, "synth");
  const auto st = mcsg_dataset_save(ds, synth_out.c_str(), sidecar ? 1 : 0);
  mcsg_dataset_free(ds);
  if (st != MCSG_OK) return report(st, "writing " + synth_out);
  return 0;
}
