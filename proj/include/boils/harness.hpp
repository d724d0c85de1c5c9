/*!
  \file harness.hpp
  \brief Experiment configuration, seeded runs with JSONL persistence,
         improvement summaries and Pareto fronts over results.
*/

#pragma once

#include "optimizer.hpp"
#include "oracle.hpp"
#include "synthenv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace boils
{

class config_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct experiment_config
{
  std::string circuit_path;
  optimizer_kind optimizer = optimizer_kind::boils;
  std::vector<std::uint64_t> seeds{ 0, 1, 2, 3, 4 };
  std::vector<std::string> tokens; /* empty selects the native passes, or all eleven with an oracle */
  optimizer_config opt;
  std::size_t n_max = 200;
  std::optional<oracle_endpoint> oracle;
  std::optional<double> stop_at_qor;
  std::string out_dir = "results";

  void validate() const
  {
    if ( opt.k < 1 )
      throw config_error( "config: k must be >= 1" );
    if ( opt.n_init > n_max )
      throw config_error( "config: n_init must not exceed n_max" );
    if ( seeds.empty() )
      throw config_error( "config: seeds must be non-empty" );
    if ( circuit_path.empty() )
      throw config_error( "config: circuit is required" );
    try
    {
      opt.validate();
      if ( oracle )
        oracle->validate();
    }
    catch ( std::exception const& e )
    {
      throw config_error( std::string( "config: " ) + e.what() );
    }
  }

  alphabet make_alphabet() const
  {
    if ( !tokens.empty() )
      return alphabet( tokens );
    return oracle ? oracle_alphabet() : native_alphabet();
  }

  /* file stem of the circuit, used as its identifier in results */
  std::string circuit_id() const { return std::filesystem::path( circuit_path ).stem().string(); }
};

namespace detail
{

inline std::string trim( std::string const& s )
{
  const auto b = s.find_first_not_of( " \t\r" );
  if ( b == std::string::npos )
    return {};
  const auto e = s.find_last_not_of( " \t\r" );
  return s.substr( b, e - b + 1 );
}

inline std::uint64_t to_u64( std::string const& key, std::string const& v )
{
  try
  {
    std::size_t pos = 0;
    if ( v.empty() || v[0] == '-' )
      throw std::invalid_argument( v );
    const auto x = std::stoull( v, &pos );
    if ( pos != v.size() )
      throw std::invalid_argument( v );
    return x;
  }
  catch ( std::exception const& )
  {
    throw config_error( "config: '" + key + "' expects a non-negative integer, got '" + v + "'" );
  }
}

inline double to_double( std::string const& key, std::string const& v )
{
  try
  {
    std::size_t pos = 0;
    const auto x = std::stod( v, &pos );
    if ( pos != v.size() || !std::isfinite( x ) )
      throw std::invalid_argument( v );
    return x;
  }
  catch ( std::exception const& )
  {
    throw config_error( "config: '" + key + "' expects a number, got '" + v + "'" );
  }
}

inline bool to_bool( std::string const& key, std::string const& v )
{
  if ( v == "true" || v == "1" )
    return true;
  if ( v == "false" || v == "0" )
    return false;
  throw config_error( "config: '" + key + "' expects true or false, got '" + v + "'" );
}

inline std::vector<std::string> split( std::string const& s, char sep )
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in( s );
  while ( std::getline( in, cur, sep ) )
    out.push_back( trim( cur ) );
  return out;
}

inline std::string format_double( double x )
{
  std::ostringstream os;
  os << std::setprecision( 17 ) << x;
  return os.str();
}

} // namespace detail

/*! \brief Sets one `key=value` entry; shared by config files and command-line overrides. */
inline void set_config_value( experiment_config& c, std::string const& key, std::string const& value )
{
  using namespace detail;
  auto& o = c.opt;
  if ( key == "circuit" )
    c.circuit_path = value;
  else if ( key == "optimizer" )
  {
    try
    {
      c.optimizer = parse_optimizer( value );
    }
    catch ( std::exception const& e )
    {
      throw config_error( std::string( "config: " ) + e.what() );
    }
  }
  else if ( key == "k" )
    o.k = to_u64( key, value );
  else if ( key == "n_max" )
    c.n_max = to_u64( key, value );
  else if ( key == "n_init" )
    o.n_init = to_u64( key, value );
  else if ( key == "seeds" )
  {
    c.seeds.clear();
    for ( auto const& s : split( value, ',' ) )
      c.seeds.push_back( to_u64( key, s ) );
  }
  else if ( key == "alphabet" )
    c.tokens = value.empty() ? std::vector<std::string>{} : split( value, ';' );
  else if ( key == "ssk.theta_m" )
    o.ssk.theta_m = to_double( key, value );
  else if ( key == "ssk.theta_g" )
    o.ssk.theta_g = to_double( key, value );
  else if ( key == "ssk.max_order" )
    o.ssk.max_order = to_u64( key, value );
  else if ( key == "tr.succ" )
    o.acq.succ_threshold = to_u64( key, value );
  else if ( key == "tr.fail" )
    o.acq.fail_threshold = to_u64( key, value );
  else if ( key == "tr.ls_budget" )
    o.acq.ls_budget = to_u64( key, value );
  else if ( key == "fit.steps" )
    o.fit.steps = to_u64( key, value );
  else if ( key == "fit.warm_steps" )
    o.warm_fit_steps = to_u64( key, value );
  else if ( key == "fit.warm_start" )
    o.warm_start = to_bool( key, value );
  else if ( key == "fit.lr" )
    o.fit.learning_rate = to_double( key, value );
  else if ( key == "fit.jitter" )
    o.fit.jitter = to_double( key, value );
  else if ( key == "fit.restarts" )
    o.fit.restarts = to_u64( key, value );
  else if ( key == "ga.population" )
    o.population = to_u64( key, value );
  else if ( key == "ga.tournament" )
    o.tournament = to_u64( key, value );
  else if ( key == "ga.mutation" )
    o.mutation_rate = to_double( key, value );
  else if ( key == "ga.crossover" )
    o.crossover_swap = to_double( key, value );
  else if ( key == "oracle.command" )
  {
    if ( !c.oracle )
      c.oracle.emplace();
    c.oracle->command = value;
  }
  else if ( key == "oracle.timeout" )
  {
    if ( !c.oracle )
      c.oracle.emplace();
    c.oracle->timeout_seconds = to_double( key, value );
  }
  else if ( key == "out" )
    c.out_dir = value;
  else if ( key == "stop_at_qor" )
    c.stop_at_qor = to_double( key, value );
  else
    throw config_error( "config: unknown key '" + key + "'" );
}

/*! \brief Parses a flat `key = value` file; `#` starts a comment line. */
inline experiment_config parse_config( std::string const& text )
{
  experiment_config c;
  std::istringstream in( text );
  std::string line;
  for ( std::size_t ln = 1; std::getline( in, line ); ++ln )
  {
    line = detail::trim( line );
    if ( line.empty() || line[0] == '#' )
      continue;
    const auto eq = line.find( '=' );
    if ( eq == std::string::npos )
      throw config_error( "config line " + std::to_string( ln ) + ": expected key=value" );
    set_config_value( c, detail::trim( line.substr( 0, eq ) ), detail::trim( line.substr( eq + 1 ) ) );
  }
  return c;
}

inline experiment_config load_config( std::string const& path )
{
  std::ifstream in( path );
  if ( !in )
    throw config_error( "cannot open config '" + path + "'" );
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config( ss.str() );
}

/* every setting that influences results except the seed and output location */
inline std::string canonical_config( experiment_config const& c )
{
  using detail::format_double;
  auto const& o = c.opt;
  std::map<std::string, std::string> kv{
      { "circuit", c.circuit_id() },
      { "optimizer", to_string( c.optimizer ) },
      { "k", std::to_string( o.k ) },
      { "n_max", std::to_string( c.n_max ) },
      { "n_init", std::to_string( o.n_init ) },
      { "alphabet", [&] {
         const auto a = c.make_alphabet();
         std::string s;
         for ( std::size_t i = 0; i < a.size(); ++i )
           s += ( i ? ";" : "" ) + a.token( static_cast<symbol>( i ) );
         return s;
       }() },
      { "ssk.theta_m", format_double( o.ssk.theta_m ) },
      { "ssk.theta_g", format_double( o.ssk.theta_g ) },
      { "ssk.max_order", std::to_string( o.ssk.max_order ) },
      { "tr.succ", std::to_string( o.acq.succ_threshold ) },
      { "tr.fail", std::to_string( o.acq.fail_threshold ) },
      { "tr.ls_budget", std::to_string( o.acq.ls_budget ) },
      { "fit.steps", std::to_string( o.fit.steps ) },
      { "fit.warm_steps", std::to_string( o.warm_fit_steps ) },
      { "fit.warm_start", o.warm_start ? "true" : "false" },
      { "fit.lr", format_double( o.fit.learning_rate ) },
      { "fit.jitter", format_double( o.fit.jitter ) },
      { "fit.restarts", std::to_string( o.fit.restarts ) },
      { "ga.population", std::to_string( o.population ) },
      { "ga.tournament", std::to_string( o.tournament ) },
      { "ga.mutation", format_double( o.mutation_rate ) },
      { "ga.crossover", format_double( o.crossover_swap ) },
      { "oracle.command", c.oracle ? c.oracle->command : "" },
      { "stop_at_qor", c.stop_at_qor ? format_double( *c.stop_at_qor ) : "" },
  };
  std::string s;
  for ( auto const& [k, v] : kv )
    s += k + "=" + v + "\n";
  return s;
}

inline std::string config_hash( experiment_config const& c )
{
  std::uint64_t h = 1469598103934665603ull;
  for ( unsigned char ch : canonical_config( c ) )
  {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw( 16 ) << std::setfill( '0' ) << h;
  return os.str();
}

/* ---------- result rows ---------- */

struct result_row
{
  std::string circuit;
  std::string optimizer;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t index = 0;
  std::size_t iteration = 0;
  std::vector<std::string> seq;
  std::size_t area = 0;
  std::size_t delay = 0;
  double qor = 0.0;

  bool operator==( result_row const& ) const = default;
};

inline nlohmann::json to_json( result_row const& r )
{
  return nlohmann::json{ { "circuit", r.circuit },   { "optimizer", r.optimizer }, { "seed", r.seed },
                         { "config_hash", r.config_hash }, { "index", r.index },   { "iteration", r.iteration },
                         { "seq", r.seq },           { "area", r.area },           { "delay", r.delay },
                         { "qor", r.qor } };
}

class schema_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline result_row parse_result_row( std::string const& line, bool strict = true )
{
  static const std::set<std::string> fields{ "circuit", "optimizer", "seed", "config_hash", "index",
                                             "iteration", "seq", "area", "delay", "qor" };
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse( line );
  }
  catch ( std::exception const& e )
  {
    throw schema_error( std::string( "result row: invalid JSON: " ) + e.what() );
  }
  if ( !j.is_object() )
    throw schema_error( "result row: not an object" );
  if ( strict )
    for ( auto const& [k, v] : j.items() )
      if ( !fields.count( k ) )
        throw schema_error( "result row: unknown field '" + k + "'" );
  try
  {
    result_row r;
    r.circuit = j.at( "circuit" ).get<std::string>();
    r.optimizer = j.at( "optimizer" ).get<std::string>();
    r.seed = j.at( "seed" ).get<std::uint64_t>();
    r.config_hash = j.at( "config_hash" ).get<std::string>();
    r.index = j.at( "index" ).get<std::size_t>();
    r.iteration = j.at( "iteration" ).get<std::size_t>();
    r.seq = j.at( "seq" ).get<std::vector<std::string>>();
    r.area = j.at( "area" ).get<std::size_t>();
    r.delay = j.at( "delay" ).get<std::size_t>();
    r.qor = j.at( "qor" ).get<double>();
    return r;
  }
  catch ( std::exception const& e )
  {
    throw schema_error( std::string( "result row: " ) + e.what() );
  }
}

inline std::vector<result_row> read_result_file( std::filesystem::path const& path, bool strict = true )
{
  std::ifstream in( path );
  if ( !in )
    throw std::runtime_error( "cannot open results file '" + path.string() + "'" );
  std::vector<result_row> rows;
  std::string line;
  while ( std::getline( in, line ) )
    if ( !line.empty() )
      rows.push_back( parse_result_row( line, strict ) );
  return rows;
}

/* all rows of every `*.jsonl` file in `dir`, in file-name order */
inline std::vector<result_row> read_results_dir( std::filesystem::path const& dir, bool strict = true )
{
  if ( !std::filesystem::is_directory( dir ) )
    throw config_error( "results directory '" + dir.string() + "' does not exist" );
  std::vector<std::filesystem::path> files;
  for ( auto const& e : std::filesystem::directory_iterator( dir ) )
    if ( e.is_regular_file() && e.path().extension() == ".jsonl" )
      files.push_back( e.path() );
  std::sort( files.begin(), files.end() );
  std::vector<result_row> rows;
  for ( auto const& f : files )
  {
    auto part = read_result_file( f, strict );
    rows.insert( rows.end(), part.begin(), part.end() );
  }
  if ( rows.empty() )
    throw config_error( "no result rows found in '" + dir.string() + "'" );
  return rows;
}

/* ---------- running ---------- */

struct run_outcome
{
  run_history history;
  std::filesystem::path results_file;
  double best_qor = 0.0;
  double improvement_pct = 0.0;
};

/*! \brief Builds the black-box evaluator for a config: native passes or the external oracle. */
inline black_box::evaluator make_evaluator( experiment_config const& c, alphabet const& alpha )
{
  if ( c.oracle )
  {
    const auto ep = *c.oracle;
    const auto path = c.circuit_path;
    const auto ref = oracle_evaluate( ep, path, reference_tokens() );
    const qor_spec spec{ ref.area, ref.delay };
    spec.validate();
    return [ep, path, spec, alpha]( sequence const& s ) {
      std::vector<std::string> toks;
      for ( auto op : s )
        toks.push_back( alpha.token( op ) );
      const auto r = oracle_evaluate( ep, path, toks );
      return qor_result{ r.area, r.delay, qor_value( r.area, r.delay, spec ) };
    };
  }
  auto env = std::make_shared<native_environment>( read_aiger_file( c.circuit_path ), alpha );
  return [env]( sequence const& s ) { return ( *env )( s ); };
}

inline std::filesystem::path results_path( experiment_config const& c, std::uint64_t seed )
{
  return std::filesystem::path( c.out_dir ) /
         ( c.circuit_id() + "_" + to_string( c.optimizer ) + "_" + std::to_string( seed ) + ".jsonl" );
}

/*! \brief One seeded run; writes the JSONL records and a wall-time sidecar next to them. */
inline run_outcome run_experiment( experiment_config const& c, std::uint64_t seed )
{
  c.validate();
  const auto alpha = c.make_alphabet();
  if ( !c.oracle )
    for ( auto const& t : alpha.tokens() )
      if ( std::find( native_pass_tokens().begin(), native_pass_tokens().end(), t ) == native_pass_tokens().end() )
        throw config_error( "config: token '" + t + "' requires an oracle" );

  black_box bb( make_evaluator( c, alpha ), c.n_max, c.stop_at_qor );
  run_outcome out;
  out.history = run_optimizer( c.optimizer, bb, alpha, c.opt, seed );

  std::filesystem::create_directories( c.out_dir );
  out.results_file = results_path( c, seed );
  const auto hash = config_hash( c );
  std::ofstream rows( out.results_file, std::ios::binary | std::ios::trunc );
  auto timing_path = out.results_file;
  timing_path.replace_extension( ".timing.csv" );
  std::ofstream timing( timing_path, std::ios::binary | std::ios::trunc );
  timing << "index,wall_time_s\n";
  for ( std::size_t i = 0; i < out.history.records.size(); ++i )
  {
    auto const& r = out.history.records[i];
    result_row row{ c.circuit_id(), to_string( c.optimizer ), seed, hash, i, r.iteration, {}, r.area, r.delay, r.qor };
    for ( auto op : r.seq )
      row.seq.push_back( alpha.token( op ) );
    rows << to_json( row ).dump() << '\n';
    timing << i << ',' << detail::format_double( r.wall_time ) << '\n';
  }
  if ( !rows || !timing )
    throw std::runtime_error( "failed writing results to '" + c.out_dir + "'" );

  out.best_qor = out.history.records.empty() ? 2.0 : out.history.best().qor;
  out.improvement_pct = qor_improvement( out.best_qor, 2.0 );
  return out;
}

/* ---------- summaries ---------- */

struct summary_row
{
  std::string circuit;
  std::string optimizer;
  double mean_impr_pct = 0.0;
  double std_impr_pct = 0.0; /* population standard deviation over seeds */
  std::size_t n_seeds = 0;
};

struct run_key
{
  std::string circuit;
  std::string optimizer;
  std::uint64_t seed;
  auto operator<=>( run_key const& ) const = default;
};

/* best row per (circuit, optimizer, seed); ties keep the earliest index */
inline std::map<run_key, result_row> best_per_run( std::vector<result_row> const& rows )
{
  std::map<run_key, result_row> best;
  for ( auto const& r : rows )
  {
    run_key key{ r.circuit, r.optimizer, r.seed };
    auto it = best.find( key );
    if ( it == best.end() || r.qor < it->second.qor || ( r.qor == it->second.qor && r.index < it->second.index ) )
      best[key] = r;
  }
  return best;
}

inline std::vector<summary_row> summarize( std::vector<result_row> const& rows )
{
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for ( auto const& [key, row] : best_per_run( rows ) )
    groups[{ key.circuit, key.optimizer }].push_back( qor_improvement( row.qor, 2.0 ) );
  std::vector<summary_row> out;
  for ( auto const& [key, v] : groups )
  {
    double mean = 0.0;
    for ( auto x : v )
      mean += x;
    mean /= static_cast<double>( v.size() );
    double var = 0.0;
    for ( auto x : v )
      var += ( x - mean ) * ( x - mean );
    out.push_back( { key.first, key.second, mean, std::sqrt( var / static_cast<double>( v.size() ) ), v.size() } );
  }
  return out;
}

inline std::string summary_csv( std::vector<summary_row> const& rows )
{
  std::ostringstream os;
  os << "circuit,optimizer,mean_impr_pct,std_impr_pct,n_seeds\n";
  for ( auto const& r : rows )
    os << r.circuit << ',' << r.optimizer << ',' << detail::format_double( r.mean_impr_pct ) << ','
       << detail::format_double( r.std_impr_pct ) << ',' << r.n_seeds << '\n';
  return os.str();
}

inline std::vector<summary_row> parse_summary_csv( std::string const& text )
{
  std::istringstream in( text );
  std::string line;
  if ( !std::getline( in, line ) || line != "circuit,optimizer,mean_impr_pct,std_impr_pct,n_seeds" )
    throw schema_error( "summary csv: bad header" );
  std::vector<summary_row> rows;
  while ( std::getline( in, line ) )
  {
    if ( line.empty() )
      continue;
    auto f = detail::split( line, ',' );
    if ( f.size() != 5 )
      throw schema_error( "summary csv: expected 5 fields" );
    rows.push_back( { f[0], f[1], std::stod( f[2] ), std::stod( f[3] ), static_cast<std::size_t>( std::stoull( f[4] ) ) } );
  }
  return rows;
}

inline std::string summary_table( std::vector<summary_row> const& rows )
{
  std::size_t wc = 7, wo = 9;
  for ( auto const& r : rows )
  {
    wc = std::max( wc, r.circuit.size() );
    wo = std::max( wo, r.optimizer.size() );
  }
  std::ostringstream os;
  os << std::left << std::setw( static_cast<int>( wc ) ) << "circuit" << "  " << std::setw( static_cast<int>( wo ) )
     << "optimizer" << "  " << std::right << std::setw( 10 ) << "mean %" << "  " << std::setw( 8 ) << "std %"
     << "  " << std::setw( 5 ) << "seeds" << '\n';
  for ( auto const& r : rows )
    os << std::left << std::setw( static_cast<int>( wc ) ) << r.circuit << "  " << std::setw( static_cast<int>( wo ) )
       << r.optimizer << "  " << std::right << std::fixed << std::setprecision( 3 ) << std::setw( 10 )
       << r.mean_impr_pct << "  " << std::setw( 8 ) << r.std_impr_pct << "  " << std::setw( 5 ) << r.n_seeds << '\n';
  return os.str();
}

/* ---------- Pareto fronts ---------- */

struct qor_point
{
  double area = 0.0;
  double delay = 0.0;

  bool operator==( qor_point const& ) const = default;
};

inline bool dominates( qor_point const& p, qor_point const& q )
{
  return p.area <= q.area && p.delay <= q.delay && ( p.area < q.area || p.delay < q.delay );
}

/*! \brief Indices of non-dominated points, ordered by (area, delay); duplicates of a front point are all kept. */
inline std::vector<std::size_t> pareto_front_indices( std::vector<qor_point> const& pts )
{
  std::vector<std::size_t> order( pts.size() );
  for ( std::size_t i = 0; i < order.size(); ++i )
    order[i] = i;
  std::stable_sort( order.begin(), order.end(), [&]( std::size_t a, std::size_t b ) {
    return pts[a].area != pts[b].area ? pts[a].area < pts[b].area : pts[a].delay < pts[b].delay;
  } );
  std::vector<std::size_t> front;
  double best_delay = std::numeric_limits<double>::infinity(); /* over strictly earlier distinct points */
  for ( std::size_t i = 0; i < order.size(); )
  {
    auto j = i;
    while ( j < order.size() && pts[order[j]] == pts[order[i]] )
      ++j;
    if ( pts[order[i]].delay < best_delay )
      front.insert( front.end(), order.begin() + static_cast<std::ptrdiff_t>( i ),
                    order.begin() + static_cast<std::ptrdiff_t>( j ) );
    best_delay = std::min( best_delay, pts[order[i]].delay );
    i = j;
  }
  return front;
}

inline std::vector<qor_point> pareto_front( std::vector<qor_point> const& pts )
{
  std::vector<qor_point> out;
  for ( auto i : pareto_front_indices( pts ) )
    out.push_back( pts[i] );
  return out;
}

struct pareto_entry
{
  std::string circuit;
  std::string optimizer;
  std::uint64_t seed = 0;
  std::size_t area = 0;
  std::size_t delay = 0;
  bool on_front = false;
};

struct pareto_report
{
  std::vector<pareto_entry> entries;
  std::map<std::pair<std::string, std::string>, double> membership_rate; /* (circuit, optimizer) -> fraction */
};

/* pools each run's best (area, delay) per circuit and marks the combined front */
inline pareto_report pareto_analysis( std::vector<result_row> const& rows )
{
  pareto_report rep;
  std::map<std::string, std::vector<pareto_entry>> by_circuit;
  for ( auto const& [key, row] : best_per_run( rows ) )
    by_circuit[key.circuit].push_back( { key.circuit, key.optimizer, key.seed, row.area, row.delay, false } );
  for ( auto& [circuit, entries] : by_circuit )
  {
    std::vector<qor_point> pts;
    for ( auto const& e : entries )
      pts.push_back( { static_cast<double>( e.area ), static_cast<double>( e.delay ) } );
    for ( auto i : pareto_front_indices( pts ) )
      entries[i].on_front = true;
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for ( auto const& e : entries )
    {
      auto& [on, total] = counts[e.optimizer];
      on += e.on_front;
      ++total;
    }
    for ( auto const& [opt, c] : counts )
      rep.membership_rate[{ circuit, opt }] = static_cast<double>( c.first ) / static_cast<double>( c.second );
    rep.entries.insert( rep.entries.end(), entries.begin(), entries.end() );
  }
  return rep;
}

inline std::string pareto_csv( pareto_report const& rep )
{
  std::ostringstream os;
  os << "circuit,optimizer,seed,area,delay,on_front\n";
  for ( auto const& e : rep.entries )
    os << e.circuit << ',' << e.optimizer << ',' << e.seed << ',' << e.area << ',' << e.delay << ','
       << ( e.on_front ? "true" : "false" ) << '\n';
  return os.str();
}

inline std::string pareto_rates_csv( pareto_report const& rep )
{
  std::ostringstream os;
  os << "circuit,optimizer,front_rate\n";
  for ( auto const& [key, rate] : rep.membership_rate )
    os << key.first << ',' << key.second << ',' << detail::format_double( rate ) << '\n';
  return os.str();
}

} // namespace boils
