#include <boils/harness.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace boils;

namespace
{

std::filesystem::path scratch( std::string const& name )
{
  auto p = std::filesystem::temp_directory_path() / ( "boils_harness_" + std::to_string( ::getpid() ) ) / name;
  std::filesystem::remove_all( p );
  std::filesystem::create_directories( p );
  return p;
}

std::string slurp( std::filesystem::path const& p )
{
  std::ifstream in( p, std::ios::binary );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

result_row row( std::string circuit, std::string opt, std::uint64_t seed, std::size_t index, double qor,
                std::size_t area = 10, std::size_t delay = 5 )
{
  return { std::move( circuit ), std::move( opt ), seed, "h", index, 0, { "balance" }, area, delay, qor };
}

experiment_config adder_config( std::string const& out )
{
  auto c = parse_config( "circuit = " + std::string( BOILS_CORPUS_DIR ) + "/adder5.aag\noptimizer = rs\nn_max = 11\nn_init = 5\n" );
  c.out_dir = out;
  return c;
}

} // namespace

TEST( Config, DefaultsAndParsing )
{
  const auto c = parse_config( "# comment\n\ncircuit = x/y.aag\noptimizer = ga\nk = 12\nseeds = 3, 4\n"
                               "ssk.theta_m = 0.25\nalphabet = rewrite;balance\nstop_at_qor = 1.5\n" );
  EXPECT_EQ( c.circuit_id(), "y" );
  EXPECT_EQ( c.optimizer, optimizer_kind::ga );
  EXPECT_EQ( c.opt.k, 12u );
  EXPECT_EQ( c.seeds, ( std::vector<std::uint64_t>{ 3, 4 } ) );
  EXPECT_EQ( c.opt.ssk.theta_m, 0.25 );
  EXPECT_EQ( c.make_alphabet().size(), 2u );
  EXPECT_EQ( *c.stop_at_qor, 1.5 );

  const auto d = parse_config( "circuit = a.aag\n" );
  EXPECT_EQ( d.n_max, 200u );
  EXPECT_EQ( d.opt.k, 20u );
  EXPECT_EQ( d.make_alphabet().size(), 7u );
  d.validate();
}

TEST( Config, Errors )
{
  EXPECT_THROW( parse_config( "bogus = 1\n" ), config_error );
  EXPECT_THROW( parse_config( "k 3\n" ), config_error );
  EXPECT_THROW( parse_config( "k = -3\n" ), config_error );
  EXPECT_THROW( parse_config( "k = 3x\n" ), config_error );
  EXPECT_THROW( parse_config( "ssk.theta_m = nan\n" ), config_error );
  EXPECT_THROW( parse_config( "optimizer = drills\n" ), config_error );
  EXPECT_THROW( parse_config( "fit.warm_start = maybe\n" ), config_error );
  EXPECT_THROW( load_config( "/nonexistent/cfg" ), config_error );
  EXPECT_THROW( parse_config( "k = 3\n" ).validate(), config_error );
  EXPECT_THROW( parse_config( "circuit = a.aag\nn_init = 300\n" ).validate(), config_error );
  EXPECT_THROW( parse_config( "circuit = a.aag\nssk.theta_m = 1.5\n" ).validate(), config_error );
  EXPECT_THROW( parse_config( "circuit = a.aag\noracle.timeout = 1\n" ).validate(), config_error );
}

TEST( Config, HashIgnoresSeedsAndOutput )
{
  auto a = parse_config( "circuit = dir1/adder.aag\nseeds = 1\nout = r1\n" );
  auto b = parse_config( "circuit = dir2/adder.aag\nseeds = 7,8\nout = r2\n" );
  EXPECT_EQ( config_hash( a ), config_hash( b ) );
  EXPECT_EQ( config_hash( a ).size(), 16u );
  set_config_value( b, "k", "19" );
  EXPECT_NE( config_hash( a ), config_hash( b ) );
  set_config_value( b, "k", "20" );
  set_config_value( b, "fit.lr", "0.2" );
  EXPECT_NE( config_hash( a ), config_hash( b ) );
}

TEST( ResultRows, RoundTripAndStrictSchema )
{
  const auto r = row( "adder5", "boils", 3, 7, 1.7071067811865475 );
  const auto line = to_json( r ).dump();
  EXPECT_EQ( parse_result_row( line ), r );

  auto j = to_json( r );
  j["extra"] = 1;
  EXPECT_THROW( parse_result_row( j.dump() ), schema_error );
  EXPECT_EQ( parse_result_row( j.dump(), false ), r );

  auto missing = to_json( r );
  missing.erase( "qor" );
  EXPECT_THROW( parse_result_row( missing.dump() ), schema_error );
  auto wrong = to_json( r );
  wrong["area"] = "ten";
  EXPECT_THROW( parse_result_row( wrong.dump() ), schema_error );
  EXPECT_THROW( parse_result_row( "{not json" ), schema_error );
  EXPECT_THROW( parse_result_row( "[1,2]" ), schema_error );
}

TEST( ResultRows, DirectoryReading )
{
  const auto dir = scratch( "read" );
  std::ofstream( dir / "b.jsonl" ) << to_json( row( "c", "rs", 1, 0, 1.9 ) ).dump() << "\n\n";
  std::ofstream( dir / "a.jsonl" ) << to_json( row( "c", "rs", 0, 0, 1.8 ) ).dump() << "\n";
  std::ofstream( dir / "a.timing.csv" ) << "index,wall_time_s\n0,0.1\n";
  const auto rows = read_results_dir( dir );
  ASSERT_EQ( rows.size(), 2u );
  EXPECT_EQ( rows[0].seed, 0u );
  EXPECT_THROW( read_results_dir( dir / "missing" ), config_error );
  EXPECT_THROW( read_results_dir( scratch( "empty" ) ), config_error );
}

TEST( Summary, MeanAndPopulationStd )
{
  std::vector<result_row> rows{ row( "c", "boils", 0, 0, 1.9 ), row( "c", "boils", 0, 1, 1.84 ),
                                row( "c", "boils", 1, 0, 1.76 ), row( "c", "boils", 1, 1, 1.95 ) };
  const auto s = summarize( rows );
  ASSERT_EQ( s.size(), 1u );
  EXPECT_NEAR( s[0].mean_impr_pct, 10.0, 1e-9 );
  EXPECT_NEAR( s[0].std_impr_pct, 2.0, 1e-9 );
  EXPECT_EQ( s[0].n_seeds, 2u );

  const auto single = summarize( { row( "c", "rs", 4, 0, 1.5 ) } );
  EXPECT_EQ( single[0].std_impr_pct, 0.0 );
  EXPECT_NEAR( single[0].mean_impr_pct, 25.0, 1e-12 );
}

TEST( Summary, CsvRoundTripAndHeader )
{
  std::vector<result_row> rows;
  for ( std::uint64_t s = 0; s < 3; ++s )
  {
    rows.push_back( row( "adder5", "rs", s, 0, 1.9 - 0.01 * s ) );
    rows.push_back( row( "dag12", "boils", s, 0, 1.7 + 0.013 * s ) );
  }
  const auto csv = summary_csv( summarize( rows ) );
  EXPECT_EQ( csv.substr( 0, csv.find( '\n' ) ), "circuit,optimizer,mean_impr_pct,std_impr_pct,n_seeds" );
  const auto back = parse_summary_csv( csv );
  const auto orig = summarize( rows );
  ASSERT_EQ( back.size(), orig.size() );
  for ( std::size_t i = 0; i < back.size(); ++i )
  {
    EXPECT_EQ( back[i].circuit, orig[i].circuit );
    EXPECT_EQ( back[i].mean_impr_pct, orig[i].mean_impr_pct );
    EXPECT_EQ( back[i].std_impr_pct, orig[i].std_impr_pct );
  }
  EXPECT_THROW( parse_summary_csv( "a,b\n" ), schema_error );
  EXPECT_FALSE( summary_table( orig ).empty() );
}

TEST( Summary, IndependentOfRowOrder )
{
  rng gen( 4 );
  std::vector<result_row> rows;
  for ( std::uint64_t s = 0; s < 5; ++s )
    for ( std::size_t i = 0; i < 6; ++i )
      for ( auto opt : { "rs", "ga" } )
        rows.push_back( row( "c", opt, s, i, 1.5 + gen.uniform_real() * 0.5 ) );
  const auto ref = summary_csv( summarize( rows ) );
  for ( int t = 0; t < 10; ++t )
  {
    for ( std::size_t i = rows.size(); i > 1; --i )
      std::swap( rows[i - 1], rows[gen.uniform_index( i )] );
    EXPECT_EQ( summary_csv( summarize( rows ) ), ref );
  }
}

TEST( Pareto, Examples )
{
  const auto front = pareto_front( { { 10, 5 }, { 8, 7 }, { 12, 4 }, { 11, 6 } } );
  EXPECT_EQ( front, ( std::vector<qor_point>{ { 8, 7 }, { 10, 5 }, { 12, 4 } } ) );
  EXPECT_EQ( pareto_front( { { 3, 3 }, { 3, 3 } } ).size(), 2u );
  EXPECT_TRUE( pareto_front( {} ).empty() );
  EXPECT_TRUE( dominates( { 1, 2 }, { 1, 3 } ) );
  EXPECT_FALSE( dominates( { 1, 2 }, { 1, 2 } ) );
}

TEST( Pareto, MatchesQuadraticOracle )
{
  rng gen( 21 );
  for ( int t = 0; t < 300; ++t )
  {
    const auto n = gen.uniform_index( 60 );
    std::vector<qor_point> pts;
    std::vector<oracle::point> opts;
    for ( std::size_t i = 0; i < n; ++i )
    {
      const double a = static_cast<double>( gen.uniform_index( 12 ) ), d = static_cast<double>( gen.uniform_index( 12 ) );
      pts.push_back( { a, d } );
      opts.push_back( { a, d } );
    }
    const auto expect = oracle::non_dominated( opts );
    auto idx = pareto_front_indices( pts );
    std::sort( idx.begin(), idx.end() );
    std::vector<std::size_t> want;
    for ( std::size_t i = 0; i < n; ++i )
      if ( expect[i] )
        want.push_back( i );
    ASSERT_EQ( idx, want );
  }
}

TEST( Pareto, AnalysisAndRates )
{
  std::vector<result_row> rows{ row( "c", "rs", 0, 0, 1.9, 10, 5 ),   row( "c", "rs", 1, 0, 1.9, 12, 6 ),
                                row( "c", "boils", 0, 0, 1.8, 8, 7 ), row( "c", "boils", 1, 0, 1.8, 12, 4 ),
                                row( "d", "rs", 0, 0, 1.0, 1, 1 ) };
  const auto rep = pareto_analysis( rows );
  EXPECT_EQ( rep.entries.size(), 5u );
  EXPECT_EQ( ( rep.membership_rate.at( { "c", "boils" } ) ), 1.0 );
  EXPECT_EQ( ( rep.membership_rate.at( { "c", "rs" } ) ), 0.5 );
  EXPECT_EQ( ( rep.membership_rate.at( { "d", "rs" } ) ), 1.0 );
  const auto csv = pareto_csv( rep );
  EXPECT_EQ( csv.substr( 0, csv.find( '\n' ) ), "circuit,optimizer,seed,area,delay,on_front" );
  EXPECT_NE( csv.find( "c,rs,1,12,6,false" ), std::string::npos );
  EXPECT_NE( pareto_rates_csv( rep ).find( "c,rs,0.5" ), std::string::npos );
}

TEST( Experiment, WritesRowsAndIsReproducible )
{
  const auto dir = scratch( "run" );
  const auto c = adder_config( dir.string() );
  const auto a = run_experiment( c, 0 );
  const auto first = slurp( a.results_file );
  EXPECT_EQ( std::count( first.begin(), first.end(), '\n' ), 11 );
  const auto rows = read_result_file( a.results_file );
  for ( std::size_t i = 0; i < rows.size(); ++i )
  {
    EXPECT_EQ( rows[i].index, i );
    EXPECT_EQ( rows[i].seq.size(), 20u );
    EXPECT_EQ( rows[i].config_hash, config_hash( c ) );
    EXPECT_EQ( rows[i].qor, a.history.records[i].qor );
  }
  auto timing = a.results_file;
  timing.replace_extension( ".timing.csv" );
  EXPECT_TRUE( std::filesystem::exists( timing ) );

  run_experiment( c, 0 );
  EXPECT_EQ( slurp( a.results_file ), first );
  EXPECT_NEAR( a.improvement_pct, qor_improvement( a.best_qor, 2.0 ), 1e-12 );
}

TEST( Experiment, RejectsOracleTokensWithoutOracle )
{
  auto c = adder_config( scratch( "tok" ).string() );
  set_config_value( c, "alphabet", "rewrite;fraig" );
  EXPECT_THROW( run_experiment( c, 0 ), config_error );
}

TEST( Experiment, OracleBackedRun )
{
  auto c = adder_config( scratch( "oracle" ).string() );
  set_config_value( c, "oracle.command", "read cmd path seq; echo \"OK $(printf '%s' \"$seq\" | tr -cd ';' | wc -c) 3\"" );
  const auto out = run_experiment( c, 1 );
  EXPECT_EQ( out.history.records.size(), 11u );
  /* 20 tokens give 19 separators against 9 for the reference */
  EXPECT_NEAR( out.history.records[0].qor, 19.0 / 9.0 + 1.0, 1e-12 );
}
