#include "vectrans/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <set>

#include "vectrans/bench.hpp"
#include "vectrans/corpus.hpp"
#include "vectrans/error.hpp"
#include "vectrans/report.hpp"
#include "vectrans/testing.hpp"
#include "vectrans/text.hpp"

namespace vectrans {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string_view generator_name(SuiteGenerator g) {
  switch (g) {
    case SuiteGenerator::Auto: return "auto";
    case SuiteGenerator::Template: return "template";
    case SuiteGenerator::Llm: return "llm";
  }
  return "auto";
}

SuiteGenerator generator_from(const std::string& s) {
  if (s == "auto") return SuiteGenerator::Auto;
  if (s == "template") return SuiteGenerator::Template;
  if (s == "llm") return SuiteGenerator::Llm;
  throw ConfigError("testing.generator must be auto, template or llm, not '" + s + "'");
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError("manifest section '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) throw ConfigError("unknown manifest key '" + std::string(section) + "." + key + "'");
  }
}

template <typename T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void take_seconds(const json& j, const char* key, std::chrono::seconds& dst) {
  if (j.contains(key)) dst = std::chrono::seconds(j.at(key).get<long long>());
}

void validate_manifest(const RunManifest& m) {
  m.llm.validate();
  if (m.engine.max_rounds < 1) throw ConfigError("budgets.max_rounds must be at least 1");
  if (m.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (m.engine.testing.trials < 1) throw ConfigError("testing.trials must be at least 1");
  if (m.engine.bench.runs < 1) throw ConfigError("bench.runs must be at least 1");
  for (const auto& [name, r] : m.engine.testing.overrides) {
    if (!(r.lo <= r.hi)) throw ConfigError("testing.overrides." + name + " has lo > hi");
  }
}

/// Everything a command needs once the manifest is resolved. Constructing
/// it checks every configured executable before any case starts.
struct Runtime {
  Compiler compiler;
  Verifier verifier;
  std::shared_ptr<Provider> provider;
  std::shared_ptr<RecordingProvider> recorder;
  std::unique_ptr<LlmClient> llm;

  Runtime(const RunManifest& m, bool need_llm, bool record)
      : compiler(m.compiler), verifier(m.verifier) {
    if (auto* replay = std::get_if<TranscriptReplay>(&m.llm.provider)) {
      if (replay->path.empty()) {
        if (need_llm) throw ConfigError("no LLM provider configured (use --llm replay:<file> or an http(s) URL)");
        return;
      }
      if (!fs::is_regular_file(replay->path)) {
        throw ConfigError("transcript not found: " + replay->path.string());
      }
    }
    provider = make_provider(m.llm);
    if (record) {
      recorder = std::make_shared<RecordingProvider>(provider);
      provider = recorder;
    }
    llm = std::make_unique<LlmClient>(m.llm, provider);
  }
};

json environment_json(const RunManifest& m, const Runtime& rt) {
  HostInfo host = detect_host();
  return json{{"compiler", rt.compiler.stamp()},
              {"verifier", rt.verifier.available() ? rt.verifier.stamp() : "none"},
              {"host", {{"cpu", host.cpu}, {"isa", host.isa}}},
              {"output_dir", fs::absolute(m.output_dir).string()},
              {"corpus", fs::absolute(m.corpus).string()}};
}

Corpus load_selected(const RunManifest& m, const Compiler& compiler, std::ostream& err) {
  if (m.corpus.empty()) throw ConfigError("no corpus given (--corpus or manifest 'corpus')");
  Corpus corpus = load_corpus(m.corpus, m.filter, compiler, m.output_dir / "ingest");
  for (const auto& issue : corpus.issues) {
    err << "corpus: " << to_string(issue.kind) << ' ' << issue.case_id << ": " << issue.message << '\n';
  }
  if (corpus.cases.empty()) throw ConfigError("the corpus selection is empty");
  return corpus;
}

struct CommonFlags {
  std::string manifest;
  std::string corpus;
  std::vector<std::string> only;
  std::string llm;
  std::string model;
  std::string compiler;
  std::string compiler_pin;
  std::string verifier;
  std::string output;
  std::string generator;
  int max_rounds = 0;
  int parallelism = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  long long case_wallclock = 0;
  long long compile_timeout = 0;
  long long verify_timeout = 0;
  bool no_bench = false;
  bool positive_only = false;
  bool no_self_feedback = false;
  std::map<std::string, CLI::Option*> opts;

  void add_to(CLI::App& app) {
    opts["manifest"] = app.add_option("-m,--manifest", manifest, "JSON run manifest");
    opts["corpus"] = app.add_option("--corpus", corpus, "C file or JSON corpus manifest");
    opts["only"] = app.add_option("--only", only, "case ids to select (repeatable)");
    opts["llm"] = app.add_option("--llm", llm, "replay:<transcript> or http(s) base URL");
    opts["model"] = app.add_option("--model", model, "model name sent to the endpoint");
    opts["compiler"] = app.add_option("--compiler", compiler, "compiler executable");
    opts["compiler-pin"] = app.add_option("--compiler-pin", compiler_pin, "required --version substring");
    opts["verifier"] = app.add_option("--verifier", verifier, "alive-tv executable, or 'none'");
    opts["output"] = app.add_option("-o,--output", output, "output directory");
    opts["generator"] = app.add_option("--generator", generator, "test generator: auto, template or llm");
    opts["max-rounds"] = app.add_option("--max-rounds", max_rounds, "refinement rounds per case");
    opts["parallelism"] = app.add_option("-j,--parallelism", parallelism, "concurrent cases");
    opts["trials"] = app.add_option("--trials", trials, "random trials per test run");
    opts["seed"] = app.add_option("--seed", seed, "test input seed");
    opts["case-wallclock"] = app.add_option("--case-wallclock", case_wallclock, "seconds per case");
    opts["compile-timeout"] = app.add_option("--compile-timeout", compile_timeout, "seconds per compile");
    opts["verify-timeout"] = app.add_option("--verify-timeout", verify_timeout, "seconds per verifier run");
    app.add_flag("--no-bench", no_bench, "skip benchmarking successful cases");
    app.add_flag("--positive-only", positive_only, "draw only non-negative test inputs");
    app.add_flag("--no-self-feedback", no_self_feedback, "skip the self-review call");
  }

  bool given(const char* name) const { return opts.at(name)->count() > 0; }

  RunManifest resolve() const {
    RunManifest m;
    if (!manifest.empty()) m = load_manifest(manifest);
    if (given("corpus")) m.corpus = corpus;
    if (given("only")) m.filter = only;
    if (given("llm")) m.llm.provider = parse_provider(llm);
    if (given("model")) m.llm.model_name = model;
    if (given("compiler")) m.compiler.executable = compiler;
    if (given("compiler-pin")) m.compiler.version_pin = compiler_pin;
    if (given("verifier")) m.verifier.executable = verifier;
    if (given("output")) m.output_dir = output;
    if (given("generator")) m.engine.testing.generator = generator_from(generator);
    if (given("max-rounds")) m.engine.max_rounds = max_rounds;
    if (given("parallelism")) m.parallelism = parallelism;
    if (given("trials")) m.engine.testing.trials = trials;
    if (given("seed")) m.engine.testing.seed = seed;
    if (given("case-wallclock")) m.engine.case_wallclock = std::chrono::seconds(case_wallclock);
    if (given("compile-timeout")) m.compiler.timeout = std::chrono::seconds(compile_timeout);
    if (given("verify-timeout")) {
      m.engine.verify_timeout = std::chrono::seconds(verify_timeout);
      m.verifier.timeout = m.engine.verify_timeout;
    }
    if (no_bench) m.engine.bench_enabled = false;
    if (positive_only) m.engine.testing.positive_only = true;
    if (no_self_feedback) m.engine.self_feedback = false;
    validate_manifest(m);
    return m;
  }
};

int cmd_run(const RunManifest& m, bool record, const fs::path& transcript_out, std::ostream& out, std::ostream& err) {
  Runtime rt(m, true, record);
  Corpus corpus = load_selected(m, rt.compiler, err);
  EngineContext ctx{rt.compiler, *rt.llm, rt.verifier, m.engine, m.output_dir};
  std::vector<RunOutcome> outcomes = run_corpus(corpus.cases, ctx, m.parallelism);
  if (rt.recorder) rt.recorder->write(transcript_out);
  CoverageReport report = build_report(outcomes);
  emit_report(report, m.output_dir, environment_json(m, rt));
  out << render_text(report);
  if (rt.recorder) out << "transcript written to " << transcript_out.string() << '\n';
  return kExitOk;
}

int cmd_validate_tests(const RunManifest& m, const std::string& driver, std::ostream& out, std::ostream& err) {
  Runtime rt(m, false, false);
  Corpus corpus = load_selected(m, rt.compiler, err);
  if (!driver.empty() && corpus.cases.size() != 1) throw ConfigError("--driver needs exactly one selected case");
  const TestingConfig& tcfg = m.engine.testing;
  int invalid = 0;
  for (const auto& fc : corpus.cases) {
    const fs::path scratch = m.output_dir / "validate-tests" / fc.id;
    TestSuite suite = driver.empty()
                          ? generate_tests(rt.llm.get(), fc, tcfg, rt.compiler, scratch / "generate")
                          : suite_from_driver(fc, read_file(driver), resolve_input_spec(fc, tcfg), SuiteOrigin::Fixture);
    SuiteValidation v = validate_suite(suite, fc, rt.compiler, scratch, tcfg.harness_timeout);
    write_file(scratch / "harness.c", suite.harness_source);
    std::string verdict = v.excluded ? "EXCLUDED" : v.validated ? "VALID" : "INVALID";
    if (!v.validated) ++invalid;
    out << fc.id << ' ' << to_string(suite.origin) << ' ' << verdict;
    if (v.reason) out << ": " << *v.reason;
    out << '\n';
  }
  out << corpus.cases.size() - invalid << '/' << corpus.cases.size() << " suites valid\n";
  return kExitOk;
}

int cmd_bench(const RunManifest& m, const std::string& candidate, bool self, bool as_json, std::ostream& out,
              std::ostream& err) {
  if (candidate.empty() == !self) throw ConfigError("bench needs exactly one of --candidate FILE or --self");
  Runtime rt(m, false, false);
  Corpus corpus = load_selected(m, rt.compiler, err);
  if (!candidate.empty() && corpus.cases.size() != 1) throw ConfigError("--candidate needs exactly one selected case");
  json records = json::array();
  for (const auto& fc : corpus.cases) {
    CandidateCode code{self ? fc.source_text : read_file(candidate), 0};
    InputSpec spec = resolve_input_spec(fc, m.engine.testing);
    BenchRecord rec = measure(fc, code, rt.compiler, m.engine.bench, spec, m.output_dir / "bench" / fc.id);
    records.push_back(to_json(rec));
    if (!as_json) {
      out << fc.id << " original " << rec.t_original << " s, candidate " << rec.t_candidate << " s, speedup "
          << rec.speedup << "x, checksum " << (rec.checksum_match ? "match" : "MISMATCH") << '\n';
    }
  }
  if (as_json) out << records.dump(2) << '\n';
  return kExitOk;
}

int cmd_report(const fs::path& archive, const std::string& output, bool as_json, std::ostream& out) {
  CoverageReport report = build_report(load_archive(archive));
  if (!output.empty()) emit_report(report, output, json{{"archive", fs::absolute(archive).string()}});
  if (as_json) {
    out << to_json(report).dump(2) << '\n';
  } else {
    out << render_text(report);
  }
  return kExitOk;
}

}  // namespace

std::variant<HttpEndpoint, TranscriptReplay> parse_provider(const std::string& spec) {
  if (spec.starts_with("replay:")) return TranscriptReplay{spec.substr(7)};
  if (spec.starts_with("http://") || spec.starts_with("https://")) return HttpEndpoint{spec};
  throw ConfigError("LLM provider must be replay:<file> or an http(s) URL, not '" + spec + "'");
}

std::string provider_spec(const LlmConfig& cfg) {
  if (auto* r = std::get_if<TranscriptReplay>(&cfg.provider)) return "replay:" + r->path.string();
  return std::get<HttpEndpoint>(cfg.provider).url;
}

void apply_manifest_json(RunManifest& m, const json& j, const fs::path& base) {
  try {
    check_keys(j, "manifest",
               {"corpus", "llm", "compiler", "verifier", "budgets", "testing", "bench", "self_feedback", "parallelism",
                "output_dir"});
    if (j.contains("corpus")) {
      const auto& c = j["corpus"];
      if (c.is_string()) {
        m.corpus = resolve(base, c.get<std::string>());
      } else {
        check_keys(c, "corpus", {"path", "filter"});
        if (c.contains("path")) m.corpus = resolve(base, c["path"].get<std::string>());
        take(c, "filter", m.filter);
      }
    }
    if (j.contains("llm")) {
      const auto& l = j["llm"];
      check_keys(l, "llm",
                 {"provider", "model", "max_tokens", "sampling", "api_key_env", "price_in_per_million",
                  "price_out_per_million", "context_window", "max_retries", "retry_base_ms", "request_timeout_s"});
      if (l.contains("provider")) {
        m.llm.provider = parse_provider(l["provider"].get<std::string>());
        if (auto* r = std::get_if<TranscriptReplay>(&m.llm.provider)) r->path = resolve(base, r->path);
      }
      take(l, "model", m.llm.model_name);
      take(l, "max_tokens", m.llm.max_tokens);
      if (l.contains("sampling")) m.llm.sampling = l["sampling"];
      take(l, "api_key_env", m.llm.api_key_env);
      take(l, "price_in_per_million", m.llm.price_in_per_million);
      take(l, "price_out_per_million", m.llm.price_out_per_million);
      take(l, "context_window", m.llm.context_window);
      take(l, "max_retries", m.llm.max_retries);
      if (l.contains("retry_base_ms")) m.llm.retry_base = std::chrono::milliseconds(l["retry_base_ms"].get<long long>());
      take_seconds(l, "request_timeout_s", m.llm.request_timeout);
    }
    if (j.contains("compiler")) {
      const auto& c = j["compiler"];
      check_keys(c, "compiler", {"executable", "version_pin", "timeout_s", "emit_ir_flags"});
      take(c, "executable", m.compiler.executable);
      take(c, "version_pin", m.compiler.version_pin);
      take_seconds(c, "timeout_s", m.compiler.timeout);
      take(c, "emit_ir_flags", m.compiler.emit_ir_flags);
    }
    if (j.contains("verifier")) {
      const auto& v = j["verifier"];
      if (v.is_string()) {
        m.verifier.executable = v.get<std::string>();
      } else if (!v.is_null()) {
        check_keys(v, "verifier", {"executable", "timeout_s", "extra_args"});
        if (v.contains("executable") && !v["executable"].is_null()) m.verifier.executable = v["executable"].get<std::string>();
        take_seconds(v, "timeout_s", m.verifier.timeout);
        take(v, "extra_args", m.verifier.extra_args);
      }
    }
    if (j.contains("budgets")) {
      const auto& b = j["budgets"];
      check_keys(b, "budgets", {"max_rounds", "compile_timeout_s", "verify_timeout_s", "case_wallclock_s"});
      take(b, "max_rounds", m.engine.max_rounds);
      take_seconds(b, "compile_timeout_s", m.compiler.timeout);
      if (b.contains("verify_timeout_s")) {
        take_seconds(b, "verify_timeout_s", m.engine.verify_timeout);
        m.verifier.timeout = m.engine.verify_timeout;
      }
      take_seconds(b, "case_wallclock_s", m.engine.case_wallclock);
    }
    if (j.contains("testing")) {
      const auto& t = j["testing"];
      check_keys(t, "testing",
                 {"seed", "trials", "positive_only", "generator", "harness_timeout_s", "llm_attempts", "overrides",
                  "rel_tol", "abs_tol"});
      auto& tc = m.engine.testing;
      take(t, "seed", tc.seed);
      take(t, "trials", tc.trials);
      take(t, "positive_only", tc.positive_only);
      if (t.contains("generator")) tc.generator = generator_from(t["generator"].get<std::string>());
      take_seconds(t, "harness_timeout_s", tc.harness_timeout);
      take(t, "llm_attempts", tc.llm_attempts);
      take(t, "rel_tol", tc.compare.rel_tol);
      take(t, "abs_tol", tc.compare.abs_tol);
      if (t.contains("overrides")) {
        for (const auto& [name, range] : t["overrides"].items()) {
          if (!range.is_array() || range.size() != 2) throw ConfigError("testing.overrides." + name + " must be [lo, hi]");
          tc.overrides[name] = ValueRange{range[0].get<double>(), range[1].get<double>()};
        }
      }
    }
    if (j.contains("bench")) {
      const auto& b = j["bench"];
      check_keys(b, "bench", {"enabled", "runs", "warmups", "min_run_seconds", "lock_file", "run_timeout_s"});
      take(b, "enabled", m.engine.bench_enabled);
      take(b, "runs", m.engine.bench.runs);
      take(b, "warmups", m.engine.bench.warmups);
      take(b, "min_run_seconds", m.engine.bench.min_run_seconds);
      if (b.contains("lock_file")) m.engine.bench.lock_file = b["lock_file"].get<std::string>();
      take_seconds(b, "run_timeout_s", m.engine.bench.run_timeout);
    }
    take(j, "self_feedback", m.engine.self_feedback);
    take(j, "parallelism", m.parallelism);
    if (j.contains("output_dir")) m.output_dir = resolve(base, j["output_dir"].get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad manifest value: ") + e.what());
  }
}

RunManifest load_manifest(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("cannot read manifest: ") + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunManifest m;
  apply_manifest_json(m, j, path.parent_path());
  return m;
}

json manifest_to_json(const RunManifest& m) {
  json overrides = json::object();
  for (const auto& [name, r] : m.engine.testing.overrides) overrides[name] = {r.lo, r.hi};
  const auto& tc = m.engine.testing;
  return json{
      {"corpus", {{"path", m.corpus.string()}, {"filter", m.filter}}},
      {"llm",
       {{"provider", provider_spec(m.llm)},
        {"model", m.llm.model_name},
        {"max_tokens", m.llm.max_tokens},
        {"sampling", m.llm.sampling},
        {"api_key_env", m.llm.api_key_env},
        {"price_in_per_million", m.llm.price_in_per_million},
        {"price_out_per_million", m.llm.price_out_per_million},
        {"context_window", m.llm.context_window},
        {"max_retries", m.llm.max_retries},
        {"retry_base_ms", m.llm.retry_base.count()},
        {"request_timeout_s", m.llm.request_timeout.count()}}},
      {"compiler",
       {{"executable", m.compiler.executable},
        {"version_pin", m.compiler.version_pin},
        {"timeout_s", m.compiler.timeout.count()},
        {"emit_ir_flags", m.compiler.emit_ir_flags}}},
      {"verifier",
       {{"executable", m.verifier.executable ? json(*m.verifier.executable) : json(nullptr)},
        {"timeout_s", m.verifier.timeout.count()},
        {"extra_args", m.verifier.extra_args}}},
      {"budgets",
       {{"max_rounds", m.engine.max_rounds},
        {"compile_timeout_s", m.compiler.timeout.count()},
        {"verify_timeout_s", m.engine.verify_timeout.count()},
        {"case_wallclock_s", m.engine.case_wallclock.count()}}},
      {"testing",
       {{"seed", tc.seed},
        {"trials", tc.trials},
        {"positive_only", tc.positive_only},
        {"generator", generator_name(tc.generator)},
        {"harness_timeout_s", tc.harness_timeout.count()},
        {"llm_attempts", tc.llm_attempts},
        {"rel_tol", tc.compare.rel_tol},
        {"abs_tol", tc.compare.abs_tol},
        {"overrides", overrides}}},
      {"bench",
       {{"enabled", m.engine.bench_enabled},
        {"runs", m.engine.bench.runs},
        {"warmups", m.engine.bench.warmups},
        {"min_run_seconds", m.engine.bench.min_run_seconds},
        {"lock_file", m.engine.bench.lock_file.string()},
        {"run_timeout_s", m.engine.bench.run_timeout.count()}}},
      {"self_feedback", m.engine.self_feedback},
      {"parallelism", m.parallelism},
      {"output_dir", m.output_dir.string()}};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LLM-assisted loop vectorization driver", "vectrans"};
  app.require_subcommand(1);

  CommonFlags run_flags, rec_flags, val_flags, bench_flags;
  bool dry_run = false;
  auto* run = app.add_subcommand("run", "refine every selected case until it vectorizes or a stop rule fires");
  run_flags.add_to(*run);
  run->add_flag("--dry-run", dry_run, "print the resolved manifest and exit");

  std::string transcript_out;
  auto* rec = app.add_subcommand("record-transcript", "run against a live endpoint and save every exchange");
  rec_flags.add_to(*rec);
  rec->add_option("--transcript-out", transcript_out, "transcript file to write")->required();

  std::string driver;
  auto* val = app.add_subcommand("validate-tests", "generate and validate the test suite of each case");
  val_flags.add_to(*val);
  val->add_option("--driver", driver, "validate this test driver (a C main) instead of a generated suite");

  std::string candidate;
  bool self = false, bench_json = false;
  auto* bench = app.add_subcommand("bench", "time a candidate against the original");
  bench_flags.add_to(*bench);
  bench->add_option("--candidate", candidate, "file holding the candidate function");
  bench->add_flag("--self", self, "time each original against itself");
  bench->add_flag("--json", bench_json, "print records as JSON");

  std::string archive, report_out;
  bool report_json = false;
  auto* report = app.add_subcommand("report", "re-render the report of an archive");
  report->add_option("archive", archive, "output directory of an earlier run")->required();
  report->add_option("-o,--output", report_out, "also write report.json and report.txt here");
  report->add_flag("--json", report_json, "print the machine-readable report");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("vectrans");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      RunManifest m = run_flags.resolve();
      if (dry_run) {
        out << manifest_to_json(m).dump(2) << '\n';
        return kExitOk;
      }
      return cmd_run(m, false, {}, out, err);
    }
    if (rec->parsed()) return cmd_run(rec_flags.resolve(), true, transcript_out, out, err);
    if (val->parsed()) return cmd_validate_tests(val_flags.resolve(), driver, out, err);
    if (bench->parsed()) return cmd_bench(bench_flags.resolve(), candidate, self, bench_json, out, err);
    if (report->parsed()) return cmd_report(archive, report_out, report_json, out);
  } catch (const ToolMissing& e) {
    err << "error: " << e.what() << '\n';
    return kExitToolMissing;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SchemaMismatch& e) {
    err << "schema error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace vectrans
