// Command-line experiment runner.
//
//   boils run --config FILE [--optimizer X] [--seed N] [--n-max M] [--circuit P] [--out DIR] [--stop-at-qor Q]
//   boils report --in DIR [--csv PATH]
//   boils pareto --in DIR --csv PATH
//
// Exit codes: 0 ok, 2 configuration or input error, 3 oracle error.

#include <boils/harness.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace
{

constexpr int exit_input = 2;
constexpr int exit_oracle = 3;

void write_file( std::string const& path, std::string const& text )
{
  std::ofstream out( path, std::ios::binary | std::ios::trunc );
  if ( !( out << text ) )
    throw boils::config_error( "cannot write '" + path + "'" );
}

int cmd_run( std::string const& config_path, std::optional<std::string> const& optimizer,
             std::optional<std::uint64_t> seed, std::optional<std::size_t> n_max,
             std::optional<std::string> const& circuit, std::optional<std::string> const& out,
             std::optional<double> stop_at )
{
  auto cfg = boils::load_config( config_path );
  if ( optimizer )
    boils::set_config_value( cfg, "optimizer", *optimizer );
  if ( seed )
    cfg.seeds = { *seed };
  if ( n_max )
    cfg.n_max = *n_max;
  if ( circuit )
    cfg.circuit_path = *circuit;
  if ( out )
    cfg.out_dir = *out;
  if ( stop_at )
    cfg.stop_at_qor = *stop_at;
  cfg.validate();

  for ( auto s : cfg.seeds )
  {
    const auto r = boils::run_experiment( cfg, s );
    std::printf( "%s %s seed %llu: best qor %.6f improvement %.3f%% (%zu evaluations) -> %s\n",
                 cfg.circuit_id().c_str(), boils::to_string( cfg.optimizer ).c_str(),
                 static_cast<unsigned long long>( s ), r.best_qor, r.improvement_pct, r.history.records.size(),
                 r.results_file.string().c_str() );
  }
  return 0;
}

int cmd_report( std::string const& in, std::optional<std::string> const& csv )
{
  const auto rows = boils::summarize( boils::read_results_dir( in ) );
  std::cout << boils::summary_table( rows );
  if ( csv )
    write_file( *csv, boils::summary_csv( rows ) );
  return 0;
}

int cmd_pareto( std::string const& in, std::string const& csv )
{
  const auto rep = boils::pareto_analysis( boils::read_results_dir( in ) );
  write_file( csv, boils::pareto_csv( rep ) );
  std::cout << boils::pareto_rates_csv( rep );
  return 0;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Sequence optimisation experiments on AIG synthesis flows" };
  app.require_subcommand( 1 );

  std::string config_path;
  std::optional<std::string> optimizer, circuit, out, csv;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_max;
  std::optional<double> stop_at;
  auto* run = app.add_subcommand( "run", "run seeded experiments from a config file" );
  run->add_option( "--config", config_path, "key=value config file" )->required();
  run->add_option( "--optimizer", optimizer, "boils, sbo, ga, rs or greedy" );
  run->add_option( "--seed", seed, "run this single seed" );
  run->add_option( "--n-max", n_max, "evaluation budget" );
  run->add_option( "--circuit", circuit, "ASCII AIGER circuit" );
  run->add_option( "--out", out, "results directory" );
  run->add_option( "--stop-at-qor", stop_at, "stop once the best QoR reaches this value" );

  std::string in_dir;
  auto* report = app.add_subcommand( "report", "mean and std of QoR improvement per circuit and optimizer" );
  report->add_option( "--in", in_dir, "results directory" )->required();
  report->add_option( "--csv", csv, "write the summary as CSV" );

  std::string pareto_csv;
  auto* pareto = app.add_subcommand( "pareto", "area/delay Pareto fronts of the best run results" );
  pareto->add_option( "--in", in_dir, "results directory" )->required();
  pareto->add_option( "--csv", pareto_csv, "output CSV" )->required();

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::ParseError const& e )
  {
    const int rc = app.exit( e );
    return rc == 0 ? 0 : exit_input;
  }

  try
  {
    if ( *run )
      return cmd_run( config_path, optimizer, seed, n_max, circuit, out, stop_at );
    if ( *report )
      return cmd_report( in_dir, csv );
    return cmd_pareto( in_dir, pareto_csv );
  }
  catch ( boils::oracle_error const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    if ( !e.output().empty() )
      std::cerr << "oracle output:\n" << e.output() << '\n';
    return exit_oracle;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  }
}
