#include "odormap/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "odormap/clustering.hpp"
#include "odormap/core_data.hpp"
#include "odormap/embedding.hpp"
#include "odormap/error.hpp"
#include "odormap/harvester.hpp"
#include "odormap/manifest.hpp"
#include "odormap/metrics.hpp"
#include "odormap/render.hpp"
#include "odormap/stats.hpp"
#include "odormap/version.hpp"

namespace odormap::cli {

namespace {

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

// The manifest lands next to the first output as <output>.manifest.json.
void write_manifest(const std::string& command, const std::vector<std::string>& argv,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_paths,
                    const std::map<std::string, std::uint64_t>& seeds) {
  RunManifest m;
  m.command = command;
  m.argv = argv;
  for (const auto& p : input_paths) m.inputs.emplace_back(p, file_hash_hex(p));
  m.outputs = output_paths;
  m.seeds = seeds;
  m.tool_version = ODORMAP_VERSION;
  m.write(output_paths.front() + ".manifest.json");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

struct DistancesArgs {
  std::string input, axis = "items", metric = "cosine", orientation = "items-as-rows", out;
};

struct HarvestArgs {
  std::string items, endpoint, model = "gpt-4o-mini", cache, template_path, out;
  std::string api_key_env = "ODORMAP_API_KEY";
  double temperature = 0.0;
  double timeout = 60.0;
  double retry_backoff = 0.25;
  std::size_t max_parallel = 4;
  std::size_t max_retries = 3;
  std::uint64_t mock_seed = 0;
  bool use_mock = false;
};

struct MantelArgs {
  std::string a, b, alternative = "two-sided";
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
};

struct GridArgs {
  std::vector<std::string> matrices;
  std::string out, alternative = "two-sided";
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
};

struct MdsArgs {
  std::string dist, out;
  std::size_t dims = 2, restarts = 4, max_iterations = 300;
  double eps = 1e-6;
  std::uint64_t seed = 0;
};

struct SweepArgs {
  std::string dist, out;
  std::size_t max_dims = 10, restarts = 4, max_iterations = 300;
  double eps = 1e-6;
  std::uint64_t seed = 0;
};

struct ClusterArgs {
  std::string dist, mode = "rows-as-features", out, linkage_csv;
};

struct MapArgs {
  std::string coords, groups, out;
};

struct DendroArgs {
  std::string tree, labels, groups, out;
};

void run_distances(const DistancesArgs& a, const std::vector<std::string>& argv) {
  ProfileMatrix profile = load_profile_csv(
      a.input, a.orientation == "items-as-columns" ? Orientation::items_as_columns
                                                   : Orientation::items_as_rows);
  DistanceMatrix d =
      pairwise_distances(profile, profile_axis_from_token(a.axis), metric_kind_from_token(a.metric));
  save_distance_csv(d, a.out);
  write_manifest("distances", argv, {a.input}, {a.out}, {});
  std::cout << "distances: wrote " << d.size() << "x" << d.size() << " '" << d.metric_tag()
            << "' matrix to " << a.out << "\n";
}

void run_harvest(const HarvestArgs& a, const std::vector<std::string>& argv) {
  ItemSet items = load_item_list(a.items);
  ProviderConfig cfg;
  cfg.endpoint_url = a.endpoint;
  cfg.model_name = a.model;
  cfg.api_key_env = a.api_key_env;
  cfg.temperature = a.temperature;
  cfg.max_parallel = a.max_parallel;
  cfg.timeout_seconds = a.timeout;
  cfg.max_retries = a.max_retries;
  cfg.retry_backoff_seconds = a.retry_backoff;

  std::string prompt_template =
      a.template_path.empty() ? default_prompt_template() : read_text_file(a.template_path);

  std::unique_ptr<ChatProvider> provider;
  if (a.use_mock) {
    provider = mock_provider(a.mock_seed);
  } else {
    if (a.endpoint.empty())
      throw Error("harvest needs --endpoint (or --mock-seed for the offline provider)");
    provider = http_provider(cfg);
  }

  HarvestReport report = harvest(items, *provider, cfg, a.cache, prompt_template);
  std::cout << "harvest: " << report.pairs_total << " pairs, " << report.cache_hits
            << " cached, " << report.pairs_requested << " requested, " << report.failed.size()
            << " failed";
  if (report.parse_warnings > 0) std::cout << ", " << report.parse_warnings << " parse warnings";
  if (report.corrupt_cache_lines > 0)
    std::cout << ", " << report.corrupt_cache_lines << " corrupt cache lines skipped";
  std::cout << "\n";

  if (!report.matrix) {
    std::size_t shown = 0;
    for (const auto& f : report.failed) {
      if (shown++ == 10) {
        std::cerr << "  ... " << report.failed.size() - 10 << " more\n";
        break;
      }
      std::cerr << "  failed: (" << f.item_a << ", " << f.item_b << "): " << f.reason << "\n";
    }
    throw Error("harvest incomplete: " + std::to_string(report.failed.size()) +
                " of " + std::to_string(report.pairs_total) +
                " pairs failed; cache retained at " + a.cache + ", re-run to resume");
  }

  save_similarity_csv(*report.matrix, a.out);
  std::vector<std::string> inputs{a.items};
  if (!a.template_path.empty()) inputs.push_back(a.template_path);
  std::map<std::string, std::uint64_t> seeds;
  if (a.use_mock) seeds["mock_seed"] = a.mock_seed;
  write_manifest("harvest", argv, inputs, {a.out, a.cache}, seeds);
  std::cout << "harvest: wrote " << items.size() << "x" << items.size()
            << " similarity matrix to " << a.out << "\n";
}

void run_sim2dist(const std::string& in, const std::string& out,
                  const std::vector<std::string>& argv) {
  SimilarityMatrix s = load_similarity_csv(in);
  DistanceMatrix d = similarity_to_distance(s);
  save_distance_csv(d, out);
  write_manifest("sim2dist", argv, {in}, {out}, {});
  std::cout << "sim2dist: wrote '" << d.metric_tag() << "' distance matrix to " << out << "\n";
}

void run_mantel(const MantelArgs& a) {
  DistanceMatrix ma = load_distance_csv(a.a);
  DistanceMatrix mb = load_distance_csv(a.b);
  MantelResult res =
      mantel(ma, mb, a.permutations, alternative_from_token(a.alternative), a.seed);
  std::cout << "r=" << format_double(res.r) << " p=" << format_double(res.p_value)
            << " stars=" << significance_stars(res.p_value)
            << " permutations=" << res.permutations << " n=" << res.n_items
            << " alternative=" << alternative_token(res.alternative) << "\n";
}

void run_grid(const GridArgs& a, const std::vector<std::string>& argv) {
  std::vector<DistanceMatrix> matrices;
  matrices.reserve(a.matrices.size());
  for (const auto& path : a.matrices) matrices.push_back(load_distance_csv(path));
  ComparisonGrid grid =
      comparison_grid(matrices, a.permutations, alternative_from_token(a.alternative), a.seed);
  save_grid_csv(grid, a.out);
  write_manifest("grid", argv, a.matrices, {a.out}, {{"seed", a.seed}});
  std::cout << "grid: " << grid.cells.size() << " pairwise results over "
            << grid.metric_tags.size() << " matrices written to " << a.out << "\n";
}

void run_mds(const MdsArgs& a, const std::vector<std::string>& argv) {
  DistanceMatrix d = load_distance_csv(a.dist);
  MdsConfig cfg{a.dims, a.restarts, a.max_iterations, a.eps, a.seed};
  EmbeddingResult e = smacof(d, cfg);
  if (!e.warning.empty()) std::cerr << "warning: " << e.warning << "\n";
  save_coords_csv(e, a.out);
  write_manifest("mds", argv, {a.dist}, {a.out}, {{"seed", a.seed}});
  std::cout << "mds: k=" << e.n_components << " raw_stress=" << format_double(e.raw_stress)
            << " stress1=" << format_double(e.stress1) << " restart=" << e.restart_index
            << " iterations=" << e.iterations_used << " -> " << a.out << "\n";
}

void run_sweep(const SweepArgs& a, const std::vector<std::string>& argv) {
  DistanceMatrix d = load_distance_csv(a.dist);
  MdsConfig cfg{2, a.restarts, a.max_iterations, a.eps, a.seed};
  std::vector<SweepRow> rows = stress_sweep(d, a.max_dims, cfg);
  save_sweep_csv(rows, a.out);
  write_manifest("sweep", argv, {a.dist}, {a.out}, {{"seed", a.seed}});
  std::cout << "sweep: k=1.." << a.max_dims << " written to " << a.out << "\n";
}

void run_cluster(const ClusterArgs& a, const std::vector<std::string>& argv) {
  DistanceMatrix input = load_distance_csv(a.dist);
  Dendrogram dg;
  if (a.mode == "rows-as-features") {
    // Each item's dissimilarity profile is its feature vector.
    ProfileMatrix profile(input.items(), input.items(), input.values());
    DistanceMatrix features =
        pairwise_distances(profile, ProfileAxis::items, MetricKind::euclidean);
    dg = average_linkage(features);
  } else if (a.mode == "precomputed") {
    dg = average_linkage(input);
  } else {
    throw Error("unknown cluster mode '" + a.mode +
                "' (expected rows-as-features or precomputed)");
  }
  save_dendrogram_json(dg, input.items(), a.out);
  std::vector<std::string> outputs{a.out};
  if (!a.linkage_csv.empty()) {
    save_linkage_csv(dg, a.linkage_csv);
    outputs.push_back(a.linkage_csv);
  }
  write_manifest("cluster", argv, {a.dist}, outputs, {});
  std::cout << "cluster: " << dg.merges.size() << " merges (" << a.mode << ") written to "
            << a.out << "\n";
}

void run_map(const MapArgs& a, const std::vector<std::string>& argv) {
  Coords coords = load_coords_csv(a.coords);
  if (coords.values.cols() != 2)
    throw Error("map needs 2-D coordinates, got k = " + std::to_string(coords.values.cols()));
  EmbeddingResult e;
  e.items = coords.items;
  e.coords = coords.values;
  e.n_components = 2;
  GroupSpec groups;
  if (!a.groups.empty()) groups = GroupSpec::load_csv(a.groups);
  render_map(e, groups, a.out);
  std::vector<std::string> inputs{a.coords};
  if (!a.groups.empty()) inputs.push_back(a.groups);
  write_manifest("map", argv, inputs, {a.out}, {});
  std::cout << "map: " << coords.items.size() << " items rendered to " << a.out << "\n";
}

void run_dendro(const DendroArgs& a, const std::vector<std::string>& argv) {
  LabeledDendrogram loaded = load_dendrogram_json(a.tree);
  ItemSet labels = a.labels.empty() ? loaded.labels : load_item_list(a.labels);
  GroupSpec groups;
  if (!a.groups.empty()) groups = GroupSpec::load_csv(a.groups);
  render_dendrogram(loaded.tree, labels, groups, a.out);
  std::vector<std::string> inputs{a.tree};
  if (!a.labels.empty()) inputs.push_back(a.labels);
  if (!a.groups.empty()) inputs.push_back(a.groups);
  write_manifest("dendro", argv, inputs, {a.out}, {});
  std::cout << "dendro: " << loaded.tree.n_leaves << " leaves rendered to " << a.out << "\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"odor map toolkit: distance matrices, LLM similarity harvesting, Mantel "
               "tests, MDS embedding, clustering and SVG maps"};
  app.set_version_flag("--version", ODORMAP_VERSION);
  app.require_subcommand(1);

  DistancesArgs distances_args;
  auto* distances = app.add_subcommand("distances", "pairwise distances from a profile CSV");
  distances->add_option("--input", distances_args.input, "profile CSV")->required();
  distances->add_option("--axis", distances_args.axis, "items | attributes");
  distances->add_option("--metric", distances_args.metric, "euclidean | correlation | cosine");
  distances->add_option("--orientation", distances_args.orientation,
                        "items-as-rows | items-as-columns");
  distances->add_option("--out", distances_args.out, "output distance CSV")->required();

  HarvestArgs harvest_args;
  auto* harvest_cmd = app.add_subcommand("harvest", "pairwise LLM similarity scores");
  harvest_cmd->add_option("--items", harvest_args.items, "item list file")->required();
  harvest_cmd->add_option("--endpoint", harvest_args.endpoint,
                          "chat-completions URL, e.g. https://api.openai.com/v1/chat/completions");
  harvest_cmd->add_option("--model", harvest_args.model, "model name");
  harvest_cmd->add_option("--cache", harvest_args.cache, "JSON-lines response cache")->required();
  harvest_cmd->add_option("--template", harvest_args.template_path,
                          "prompt template file with {a} and {b} placeholders");
  harvest_cmd->add_option("--max-parallel", harvest_args.max_parallel, "concurrent requests");
  harvest_cmd->add_option("--out", harvest_args.out, "output similarity CSV")->required();
  harvest_cmd->add_option("--api-key-env", harvest_args.api_key_env,
                          "env var holding the bearer token");
  harvest_cmd->add_option("--temperature", harvest_args.temperature, "sampling temperature");
  harvest_cmd->add_option("--timeout", harvest_args.timeout, "request timeout in seconds");
  harvest_cmd->add_option("--max-retries", harvest_args.max_retries, "retries per pair");
  harvest_cmd->add_option("--retry-backoff", harvest_args.retry_backoff,
                          "initial retry delay in seconds, doubling per retry");
  auto* mock_opt = harvest_cmd->add_option("--mock-seed", harvest_args.mock_seed,
                                           "use the deterministic offline provider");

  std::string sim2dist_in, sim2dist_out;
  auto* sim2dist = app.add_subcommand("sim2dist", "similarity matrix to distance matrix");
  sim2dist->add_option("--in", sim2dist_in, "similarity CSV")->required();
  sim2dist->add_option("--out", sim2dist_out, "distance CSV")->required();

  MantelArgs mantel_args;
  auto* mantel_cmd = app.add_subcommand("mantel", "Mantel permutation test");
  mantel_cmd->add_option("--a", mantel_args.a, "distance CSV")->required();
  mantel_cmd->add_option("--b", mantel_args.b, "distance CSV")->required();
  mantel_cmd->add_option("--permutations", mantel_args.permutations, "permutation count");
  mantel_cmd->add_option("--alternative", mantel_args.alternative, "greater | less | two-sided");
  mantel_cmd->add_option("--seed", mantel_args.seed, "permutation seed");

  GridArgs grid_args;
  auto* grid_cmd = app.add_subcommand("grid", "all-pairs Mantel comparison grid");
  grid_cmd->add_option("--matrices", grid_args.matrices, "distance CSVs")
      ->required()
      ->expected(2, -1);
  grid_cmd->add_option("--out", grid_args.out, "grid CSV")->required();
  grid_cmd->add_option("--permutations", grid_args.permutations, "permutation count");
  grid_cmd->add_option("--alternative", grid_args.alternative, "greater | less | two-sided");
  grid_cmd->add_option("--seed", grid_args.seed, "permutation seed");

  MdsArgs mds_args;
  auto* mds_cmd = app.add_subcommand("mds", "metric MDS embedding (SMACOF)");
  mds_cmd->add_option("--dist", mds_args.dist, "distance CSV")->required();
  mds_cmd->add_option("--dims", mds_args.dims, "embedding dimension");
  mds_cmd->add_option("--restarts", mds_args.restarts, "random restarts");
  mds_cmd->add_option("--max-iterations", mds_args.max_iterations, "iteration cap per restart");
  mds_cmd->add_option("--eps", mds_args.eps, "relative raw-stress convergence threshold");
  mds_cmd->add_option("--seed", mds_args.seed, "initialization seed");
  mds_cmd->add_option("--out", mds_args.out, "coordinates CSV")->required();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "stress vs. dimension sweep");
  sweep_cmd->add_option("--dist", sweep_args.dist, "distance CSV")->required();
  sweep_cmd->add_option("--max-dims", sweep_args.max_dims, "sweep k = 1..max-dims")->required();
  sweep_cmd->add_option("--restarts", sweep_args.restarts, "random restarts per k");
  sweep_cmd->add_option("--max-iterations", sweep_args.max_iterations, "iteration cap");
  sweep_cmd->add_option("--eps", sweep_args.eps, "convergence threshold");
  sweep_cmd->add_option("--seed", sweep_args.seed, "initialization seed");
  sweep_cmd->add_option("--out", sweep_args.out, "sweep CSV")->required();

  ClusterArgs cluster_args;
  auto* cluster_cmd = app.add_subcommand("cluster", "average-linkage hierarchical clustering");
  cluster_cmd->add_option("--dist", cluster_args.dist, "distance CSV")->required();
  cluster_cmd->add_option("--mode", cluster_args.mode, "rows-as-features | precomputed");
  cluster_cmd->add_option("--out", cluster_args.out, "dendrogram JSON")->required();
  cluster_cmd->add_option("--linkage-csv", cluster_args.linkage_csv,
                          "optional 4-column linkage CSV");

  MapArgs map_args;
  auto* map_cmd = app.add_subcommand("map", "render a 2-D odor map SVG");
  map_cmd->add_option("--coords", map_args.coords, "coordinates CSV")->required();
  map_cmd->add_option("--groups", map_args.groups, "group CSV (label,group,color)");
  map_cmd->add_option("--out", map_args.out, "output SVG")->required();

  DendroArgs dendro_args;
  auto* dendro_cmd = app.add_subcommand("dendro", "render a dendrogram SVG");
  dendro_cmd->add_option("--tree", dendro_args.tree, "dendrogram JSON")->required();
  dendro_cmd->add_option("--labels", dendro_args.labels, "leaf label override file");
  dendro_cmd->add_option("--groups", dendro_args.groups, "group CSV (label,group,color)");
  dendro_cmd->add_option("--out", dendro_args.out, "output SVG")->required();

  std::string replay_manifest;
  auto* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay_cmd->add_option("--manifest", replay_manifest, "manifest JSON")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("odormap");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  }

  harvest_args.use_mock = mock_opt->count() > 0;

  try {
    if (distances->parsed()) run_distances(distances_args, args);
    else if (harvest_cmd->parsed()) run_harvest(harvest_args, args);
    else if (sim2dist->parsed()) run_sim2dist(sim2dist_in, sim2dist_out, args);
    else if (mantel_cmd->parsed()) run_mantel(mantel_args);
    else if (grid_cmd->parsed()) run_grid(grid_args, args);
    else if (mds_cmd->parsed()) run_mds(mds_args, args);
    else if (sweep_cmd->parsed()) run_sweep(sweep_args, args);
    else if (cluster_cmd->parsed()) run_cluster(cluster_args, args);
    else if (map_cmd->parsed()) run_map(map_args, args);
    else if (dendro_cmd->parsed()) run_dendro(dendro_args, args);
    else if (replay_cmd->parsed()) {
      RunManifest m = RunManifest::load(replay_manifest);
      if (m.command == "replay") throw Error("refusing to replay a replay manifest");
      std::cout << "replay: " << m.command << " (recorded " << m.timestamp_utc << ")\n";
      return dispatch(m.argv);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace odormap::cli
