/*
 * Licensed to the Apache Software Foundation (ASF) under one
 * or more contributor license agreements.  See the NOTICE file
 * distributed with this work for additional information
 * regarding copyright ownership.  The ASF licenses this file
 * to you under the Apache License, Version 2.0 (the
 * "License"); you may not use this file except in compliance
 * with the License.  You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing,
 * software distributed under the License is distributed on an
 * "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, either express or implied.  See the License for the
 * specific language governing permissions and limitations
 * under the License.
 */

#include "hdh/cli.hpp"

#include <bit>
#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdh/datagen.hpp"
#include "hdh/errors.hpp"
#include "hdh/metrics.hpp"
#include "hdh/sketch.hpp"

namespace hdh {

namespace {

constexpr uint64_t kLargeStreamWarning = 10'000'000;

struct SketchOptions {
  std::string variant = "ssss";
  uint32_t size = 2000;
  uint32_t registers = 1024;
  std::string counter = "hll";
  uint64_t seed = 1;

  bool exact() const { return counter == "exact"; }

  SketchConfig config() const {
    const uint16_t log2 = exact() ? kExactCounterLog2 : static_cast<uint16_t>(std::countr_zero(registers));
    return SketchConfig::from_seed(parse_variant(variant), size, log2, seed);
  }
};

struct InputOptions {
  std::string path;
  std::string delimiter = ",";
  std::size_t label_col = 0;
  std::size_t item_col = 1;
  std::string generate;
  ZipfSpec zipf = ZipfSpec::desk();
  OverlapSpec overlap = OverlapSpec::desk();
};

char delimiter_char(const std::string& d) {
  if (d == "tab" || d == "\\t") return '\t';
  return d.at(0);
}

// A fresh source each call, so eval can replay the identical stream twice.
std::unique_ptr<EntrySource> open_source(const InputOptions& in, std::ostream& err) {
  if (in.generate == "zipf") {
    if (in.zipf.entries > kLargeStreamWarning) err << "warning: generating " << in.zipf.entries << " entries\n";
    return std::make_unique<ZipfGenerator>(in.zipf);
  }
  if (in.generate == "overlap") {
    if (in.overlap.total_entries() > kLargeStreamWarning) {
      err << "warning: generating " << in.overlap.total_entries() << " entries\n";
    }
    return std::make_unique<OverlapGenerator>(in.overlap);
  }
  return std::make_unique<DelimitedReader>(in.path, delimiter_char(in.delimiter), in.label_col, in.item_col);
}

uint64_t skipped_lines(const EntrySource& source) {
  auto reader = dynamic_cast<const DelimitedReader*>(&source);
  return reader ? reader->skipped() : 0;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read error on '" + path + "'");
  return bytes;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write error on '" + path + "'");
}

template <class Sketch>
void print_stats(std::ostream& out, const Sketch& sk) {
  const auto& st = sk.stats();
  out << "inserts\t" << st.inserts << '\n'
      << "gate_rejections\t" << st.gate_rejections << '\n'
      << "min_scans\t" << st.min_scans << '\n'
      << "evictions\t" << st.evictions << '\n'
      << "resident_labels\t" << sk.size() << '\n';
}

void print_top(std::ostream& out, const TopList& top) {
  out << "label\testimate\n";
  for (const auto& e : top) out << e.label << '\t' << format_number(e.estimate) << '\n';
}

template <class Counter>
int ingest(const SketchOptions& so, const InputOptions& io, const std::string& out_path, std::ostream& out,
           std::ostream& err) {
  SpaceSavingSets<Counter> sk(so.config());
  auto source = open_source(io, err);
  uint64_t n = 0;
  while (auto e = source->next()) {
    sk.insert(e->label, e->item);
    ++n;
  }
  const auto bytes = sk.serialize();
  write_file(out_path, bytes);
  out << "entries\t" << n << '\n' << "skipped\t" << skipped_lines(*source) << '\n';
  print_stats(out, sk);
  out << "sketch_bytes\t" << bytes.size() << '\n';
  return kExitOk;
}

template <class Counter>
int query(const std::vector<uint8_t>& bytes, std::size_t k, std::ostream& out) {
  print_top(out, SpaceSavingSets<Counter>::deserialize(bytes).top(k));
  return kExitOk;
}

template <class Counter>
int merge(const std::vector<std::string>& inputs, const std::vector<uint8_t>& first, const std::string& out_path,
          std::ostream& out) {
  auto merged = SpaceSavingSets<Counter>::deserialize(first);
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    merged.merge(SpaceSavingSets<Counter>::deserialize(read_file(inputs[i])));
  }
  // a single input still goes through merge so theta is recomputed the same way
  if (inputs.size() == 1) merged.merge(SpaceSavingSets<Counter>(merged.config()));
  const auto bytes = merged.serialize();
  write_file(out_path, bytes);
  out << "inputs\t" << inputs.size() << '\n'
      << "resident_labels\t" << merged.size() << '\n'
      << "sketch_bytes\t" << bytes.size() << '\n';
  return kExitOk;
}

template <class Counter>
int eval(const SketchOptions& so, const InputOptions& io, const std::vector<std::size_t>& ks, bool baseline,
         const std::string& format, std::ostream& out, std::ostream& err) {
  GroundTruth truth;
  {
    auto source = open_source(io, err);
    while (auto e = source->next()) truth.add(e->label, e->item);
  }
  SpaceSavingSets<Counter> sk(so.config());
  {
    auto source = open_source(io, err);
    while (auto e = source->next()) sk.insert(e->label, e->item);
  }
  const auto report = evaluate(sk, truth, ks);
  const bool jsonl = format == "jsonl";
  if (!jsonl) out << "# sketch_bytes\t" << sk.serialize().size() << '\n';
  jsonl ? write_jsonl(out, report) : write_table(out, report);
  if (baseline) {
    if (!jsonl) out << "# all-zero baseline\n";
    const auto base = zero_baseline(truth, ks);
    jsonl ? write_jsonl(out, base) : write_table(out, base);
  }
  return kExitOk;
}

template <class Counter>
int bench(const SketchOptions& so, const InputOptions& io, std::ostream& out, std::ostream& err) {
  auto source = open_source(io, err);
  const auto entries = drain(*source);
  SpaceSavingSets<Counter> sk(so.config());
  const auto start = std::chrono::steady_clock::now();
  for (const auto& e : entries) sk.insert(e.label, e.item);
  const auto stop = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
  const auto& st = sk.stats();
  // every insert of a new label into a full sketch either evicts or is rejected
  const uint64_t non_resident_full = st.gate_rejections + st.evictions;
  out << "entries\t" << entries.size() << '\n'
      << "elapsed_ms\t" << format_number(ms) << '\n'
      << "entries_per_ms\t" << format_number(ms > 0 ? static_cast<double>(entries.size()) / ms : 0.0) << '\n';
  print_stats(out, sk);
  out << "non_resident_full_inserts\t" << non_resident_full << '\n'
      << "scan_ratio\t"
      << format_number(non_resident_full > 0 ? static_cast<double>(st.min_scans) / static_cast<double>(non_resident_full)
                                             : 0.0)
      << '\n'
      << "sketch_bytes\t" << sk.serialize().size() << '\n';
  return kExitOk;
}

void add_sketch_options(CLI::App* cmd, SketchOptions& so) {
  cmd->add_option("--variant", so.variant, "sketch variant")->check(CLI::IsMember({"sss", "rsss", "ssss"}));
  cmd->add_option("--size", so.size, "maximum number of labels kept")->check(CLI::PositiveNumber);
  cmd->add_option("--registers", so.registers, "HLL registers per counter (power of two, 16..65536)")
      ->check([](const std::string& v) -> std::string {
        unsigned long r = 0;
        try {
          r = std::stoul(v);
        } catch (...) {
          return "not a number";
        }
        if (r < 16 || r > 65536 || (r & (r - 1)) != 0) return "must be a power of two in 16..65536";
        return {};
      });
  cmd->add_option("--counter", so.counter, "count-distinct counter")->check(CLI::IsMember({"hll", "exact"}));
  cmd->add_option("--seed", so.seed, "hash seed");
}

void add_zipf_options(CLI::App* cmd, ZipfSpec& z, const std::string& seed_flag) {
  cmd->add_option("--labels", z.labels, "number of Zipf labels")->check(CLI::PositiveNumber);
  cmd->add_option("--exponent", z.exponent, "Zipf exponent")->check(CLI::PositiveNumber);
  cmd->add_option("--entries", z.entries, "number of entries");
  cmd->add_option(seed_flag, z.seed, "generator seed");
}

void add_overlap_options(CLI::App* cmd, OverlapSpec& o) {
  cmd->add_option("--universe", o.universe_size, "item universe size");
  cmd->add_option("--common", o.common_size, "common pool size");
  cmd->add_option("--small-sets", o.small_sets, "number of small sets");
  cmd->add_option("--small-size", o.small_set_size, "items per small set");
  cmd->add_option("--heavy-sets", o.heavy_sets, "number of heavy sets");
  cmd->add_option("--heavy-size", o.heavy_set_size, "items per heavy set");
}

// positional file or --generate, not both
void add_input_options(CLI::App* cmd, InputOptions& io) {
  auto file = cmd->add_option("input", io.path, "delimited input file (label,item per line)");
  auto gen = cmd->add_option("--generate", io.generate, "use a generator instead of a file")
                 ->check(CLI::IsMember({"zipf", "overlap"}));
  file->excludes(gen);
  cmd->add_option("--delimiter", io.delimiter, "field delimiter (single character or 'tab')");
  cmd->add_option("--label-col", io.label_col, "0-based label column");
  cmd->add_option("--item-col", io.item_col, "0-based item column");
  add_zipf_options(cmd, io.zipf, "--data-seed");
  cmd->add_option("--universe", io.overlap.universe_size, "overlap: item universe size");
  cmd->add_option("--common", io.overlap.common_size, "overlap: common pool size");
  cmd->add_option("--small-sets", io.overlap.small_sets, "overlap: number of small sets");
  cmd->add_option("--small-size", io.overlap.small_set_size, "overlap: items per small set");
  cmd->add_option("--heavy-sets", io.overlap.heavy_sets, "overlap: number of heavy sets");
  cmd->add_option("--heavy-size", io.overlap.heavy_set_size, "overlap: items per heavy set");
  cmd->callback([cmd, &io] {
    if (io.path.empty() && io.generate.empty()) {
      throw CLI::RequiredError(cmd->get_name() + ": an input file or --generate is required");
    }
    if (io.delimiter.empty() || (io.delimiter.size() > 1 && io.delimiter != "tab" && io.delimiter != "\\t")) {
      throw CLI::ValidationError("--delimiter", "must be a single character or 'tab'");
    }
    // overlap presets share --data-seed with zipf
    io.overlap.seed = io.zipf.seed;
  });
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heavy distinct hitters with Space-Saving Set sketches", "hdh"};
  app.require_subcommand(1);

  SketchOptions so;
  InputOptions io;
  std::string out_path;
  std::size_t query_k = 10;
  std::vector<std::size_t> ks{10, 100, 1000};
  std::vector<std::string> inputs;
  std::string sketch_path;
  bool baseline = false;
  std::string format = "table";
  ZipfSpec gen_zipf = ZipfSpec::desk();
  OverlapSpec gen_overlap = OverlapSpec::desk();

  auto ingest_cmd = app.add_subcommand("ingest", "build a sketch from a stream and write it to --out");
  add_sketch_options(ingest_cmd, so);
  add_input_options(ingest_cmd, io);
  ingest_cmd->add_option("--out", out_path, "sketch file to write")->required();

  auto query_cmd = app.add_subcommand("query", "print the top k labels of a sketch file");
  query_cmd->add_option("sketch", sketch_path, "sketch file")->required();
  query_cmd->add_option("--topk", query_k, "number of labels to print");

  auto merge_cmd = app.add_subcommand("merge", "fold sketch files left to right into --out");
  merge_cmd->add_option("sketches", inputs, "sketch files")->required();
  merge_cmd->add_option("--out", out_path, "merged sketch file")->required();

  auto eval_cmd = app.add_subcommand("eval", "compare a sketch against exact counts");
  add_sketch_options(eval_cmd, so);
  add_input_options(eval_cmd, io);
  eval_cmd->add_option("--topk", ks, "comma-separated k values")->delimiter(',')->check(CLI::PositiveNumber);
  eval_cmd->add_flag("--baseline", baseline, "also report the all-zero estimator");
  eval_cmd->add_option("--format", format, "table or jsonl")->check(CLI::IsMember({"table", "jsonl"}));

  auto gen_cmd = app.add_subcommand("gen", "write a synthetic stream as label,item lines");
  gen_cmd->require_subcommand(1);
  gen_cmd->add_option("--out", out_path, "output file (default stdout)");
  auto gen_zipf_cmd = gen_cmd->add_subcommand("zipf", "Zipf-distributed labels with random items");
  add_zipf_options(gen_zipf_cmd, gen_zipf, "--seed");
  gen_zipf_cmd->add_option("--out", out_path, "output file (default stdout)");
  auto gen_overlap_cmd = gen_cmd->add_subcommand("overlap", "small sets over a common pool plus heavy sets");
  add_overlap_options(gen_overlap_cmd, gen_overlap);
  gen_overlap_cmd->add_option("--seed", gen_overlap.seed, "generator seed");
  gen_overlap_cmd->add_option("--out", out_path, "output file (default stdout)");

  auto bench_cmd = app.add_subcommand("bench", "measure insert throughput");
  add_sketch_options(bench_cmd, so);
  add_input_options(bench_cmd, io);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest_cmd) {
      return so.exact() ? ingest<ExactCounter>(so, io, out_path, out, err)
                        : ingest<HyperLogLog>(so, io, out_path, out, err);
    }
    if (*query_cmd) {
      const auto bytes = read_file(sketch_path);
      return read_sketch_header(bytes).exact_counters() ? query<ExactCounter>(bytes, query_k, out)
                                                        : query<HyperLogLog>(bytes, query_k, out);
    }
    if (*merge_cmd) {
      const auto first = read_file(inputs.front());
      return read_sketch_header(first).exact_counters() ? merge<ExactCounter>(inputs, first, out_path, out)
                                                        : merge<HyperLogLog>(inputs, first, out_path, out);
    }
    if (*eval_cmd) {
      return so.exact() ? eval<ExactCounter>(so, io, ks, baseline, format, out, err)
                        : eval<HyperLogLog>(so, io, ks, baseline, format, out, err);
    }
    if (*gen_cmd) {
      std::unique_ptr<EntrySource> source;
      if (*gen_zipf_cmd) {
        if (gen_zipf.entries > kLargeStreamWarning) err << "warning: generating " << gen_zipf.entries << " entries\n";
        source = std::make_unique<ZipfGenerator>(gen_zipf);
      } else {
        if (gen_overlap.total_entries() > kLargeStreamWarning) {
          err << "warning: generating " << gen_overlap.total_entries() << " entries\n";
        }
        source = std::make_unique<OverlapGenerator>(gen_overlap);
      }
      if (out_path.empty()) {
        write_delimited(out, *source);
      } else {
        std::ofstream f(out_path, std::ios::trunc);
        if (!f) throw IoError("cannot open '" + out_path + "' for writing");
        write_delimited(f, *source);
        if (!f) throw IoError("write error on '" + out_path + "'");
      }
      return kExitOk;
    }
    if (*bench_cmd) {
      return so.exact() ? bench<ExactCounter>(so, io, out, err) : bench<HyperLogLog>(so, io, out, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIncompatible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace hdh
