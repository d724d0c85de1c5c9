/*!
  \file aig.hpp
  \brief And-Inverter Graphs with complemented edges.

  Node 0 is constant false, nodes 1..I are primary inputs and the remaining
  nodes are two-input AND gates in topological order. A literal is
  `2 * node + complement`.
*/

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace boils
{

using literal = std::uint32_t;
using node_id = std::uint32_t;

inline constexpr literal const0 = 0;
inline constexpr literal const1 = 1;

constexpr literal make_literal( node_id n, bool complemented = false ) { return ( n << 1 ) | ( complemented ? 1u : 0u ); }
constexpr node_id node_of( literal l ) { return l >> 1; }
constexpr bool is_complemented( literal l ) { return l & 1u; }
constexpr literal negate( literal l ) { return l ^ 1u; }
constexpr literal negate_if( literal l, bool c ) { return l ^ ( c ? 1u : 0u ); }

struct and_gate
{
  literal fanin0; /* fanin0 < fanin1 */
  literal fanin1;

  bool operator==( and_gate const& ) const = default;
};

class aiger_parse_error : public std::runtime_error
{
public:
  aiger_parse_error( std::size_t line, std::string const& what )
      : std::runtime_error( "aiger line " + std::to_string( line ) + ": " + what ), line_( line )
  {
  }
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class aig_network
{
public:
  aig_network() = default;

  /*! \brief Wraps a raw gate list without hashing or simplification.

    Only range and topological order are validated, so duplicate gates are
    representable; passes re-hash on entry.
  */
  static aig_network from_raw( std::uint32_t num_inputs, std::vector<and_gate> gates, std::vector<literal> outputs )
  {
    aig_network n;
    n.num_inputs_ = num_inputs;
    n.gates_ = std::move( gates );
    n.outputs_ = std::move( outputs );
    for ( std::size_t g = 0; g < n.gates_.size(); ++g )
    {
      const auto self = static_cast<node_id>( 1 + num_inputs + g );
      auto& gate = n.gates_[g];
      if ( gate.fanin0 > gate.fanin1 )
        std::swap( gate.fanin0, gate.fanin1 );
      if ( node_of( gate.fanin1 ) >= self )
        throw std::invalid_argument( "aig: gate fanin violates topological order" );
    }
    for ( auto o : n.outputs_ )
      if ( node_of( o ) >= n.num_nodes() )
        throw std::invalid_argument( "aig: output literal out of range" );
    return n;
  }

  std::uint32_t num_inputs() const noexcept { return num_inputs_; }
  std::size_t num_gates() const noexcept { return gates_.size(); }
  std::size_t num_nodes() const noexcept { return 1 + num_inputs_ + gates_.size(); }
  std::size_t num_outputs() const noexcept { return outputs_.size(); }

  bool is_constant( node_id n ) const noexcept { return n == 0; }
  bool is_input( node_id n ) const noexcept { return n >= 1 && n <= num_inputs_; }
  bool is_and( node_id n ) const noexcept { return n > num_inputs_ && n < num_nodes(); }

  node_id first_gate() const noexcept { return num_inputs_ + 1; }
  and_gate const& gate( node_id n ) const { return gates_.at( n - first_gate() ); }
  std::vector<and_gate> const& gates() const noexcept { return gates_; }
  std::vector<literal> const& outputs() const noexcept { return outputs_; }

  literal input( std::uint32_t i ) const { return make_literal( 1 + i ); }

  bool operator==( aig_network const& ) const = default;

private:
  friend class aig_builder;

  std::uint32_t num_inputs_ = 0;
  std::vector<and_gate> gates_;
  std::vector<literal> outputs_;
};

/*! \brief Incremental AIG construction with structural hashing.

  `create_and` folds constants, x & x and x & !x, and returns an existing
  node for a repeated fanin pair.
*/
class aig_builder
{
public:
  explicit aig_builder( std::uint32_t num_inputs ) { ntk_.num_inputs_ = num_inputs; }

  literal input( std::uint32_t i ) const
  {
    if ( i >= ntk_.num_inputs_ )
      throw std::out_of_range( "aig_builder: input index" );
    return make_literal( 1 + i );
  }

  std::uint32_t num_inputs() const noexcept { return ntk_.num_inputs_; }
  std::size_t num_nodes() const noexcept { return ntk_.num_nodes(); }

  /* result of a & b without creating anything: a literal if trivial or hashed */
  std::optional<literal> lookup_and( literal a, literal b ) const
  {
    if ( auto t = trivial( a, b ) )
      return t;
    if ( a > b )
      std::swap( a, b );
    auto it = table_.find( key( a, b ) );
    if ( it == table_.end() )
      return std::nullopt;
    return make_literal( it->second );
  }

  literal create_and( literal a, literal b )
  {
    if ( node_of( a ) >= ntk_.num_nodes() || node_of( b ) >= ntk_.num_nodes() )
      throw std::out_of_range( "aig_builder: fanin literal out of range" );
    if ( auto t = trivial( a, b ) )
      return *t;
    if ( a > b )
      std::swap( a, b );
    auto [it, inserted] = table_.emplace( key( a, b ), static_cast<node_id>( ntk_.num_nodes() ) );
    if ( inserted )
      ntk_.gates_.push_back( { a, b } );
    return make_literal( it->second );
  }

  literal create_or( literal a, literal b ) { return negate( create_and( negate( a ), negate( b ) ) ); }

  /* three-node sum-of-products form */
  literal create_xor( literal a, literal b )
  {
    return create_or( create_and( a, negate( b ) ), create_and( negate( a ), b ) );
  }

  literal create_mux( literal sel, literal then_, literal else_ )
  {
    return create_or( create_and( sel, then_ ), create_and( negate( sel ), else_ ) );
  }

  void add_output( literal l )
  {
    if ( node_of( l ) >= ntk_.num_nodes() )
      throw std::out_of_range( "aig_builder: output literal out of range" );
    ntk_.outputs_.push_back( l );
  }

  aig_network const& peek() const noexcept { return ntk_; }
  aig_network build() && { return std::move( ntk_ ); }

private:
  static std::uint64_t key( literal a, literal b ) { return ( static_cast<std::uint64_t>( a ) << 32 ) | b; }

  static std::optional<literal> trivial( literal a, literal b )
  {
    if ( a == const0 || b == const0 || a == negate( b ) )
      return const0;
    if ( a == const1 )
      return b;
    if ( b == const1 || a == b )
      return a;
    return std::nullopt;
  }

  aig_network ntk_;
  std::unordered_map<std::uint64_t, node_id> table_;
};

/*! \brief Nodes in the transitive fanin of the outputs. */
inline std::vector<bool> reachable_nodes( aig_network const& ntk )
{
  std::vector<bool> seen( ntk.num_nodes(), false );
  std::vector<node_id> stack;
  for ( auto o : ntk.outputs() )
    stack.push_back( node_of( o ) );
  while ( !stack.empty() )
  {
    auto n = stack.back();
    stack.pop_back();
    if ( seen[n] )
      continue;
    seen[n] = true;
    if ( ntk.is_and( n ) )
    {
      stack.push_back( node_of( ntk.gate( n ).fanin0 ) );
      stack.push_back( node_of( ntk.gate( n ).fanin1 ) );
    }
  }
  return seen;
}

/* AND depth of every node; inputs and the constant are at level 0 */
inline std::vector<std::uint32_t> node_levels( aig_network const& ntk )
{
  std::vector<std::uint32_t> level( ntk.num_nodes(), 0 );
  for ( node_id n = ntk.first_gate(); n < ntk.num_nodes(); ++n )
  {
    auto const& g = ntk.gate( n );
    level[n] = 1 + std::max( level[node_of( g.fanin0 )], level[node_of( g.fanin1 )] );
  }
  return level;
}

struct circuit_stats
{
  std::size_t area = 0;  /* AND nodes reachable from the outputs */
  std::size_t delay = 0; /* maximum AND depth over the outputs */

  bool operator==( circuit_stats const& ) const = default;
};

inline circuit_stats stats( aig_network const& ntk )
{
  circuit_stats s;
  const auto seen = reachable_nodes( ntk );
  for ( node_id n = ntk.first_gate(); n < ntk.num_nodes(); ++n )
    s.area += seen[n];
  const auto level = node_levels( ntk );
  for ( auto o : ntk.outputs() )
    s.delay = std::max<std::size_t>( s.delay, level[node_of( o )] );
  return s;
}

/*! \brief Rebuilds through the hashing builder, keeping only reachable nodes in their original order. */
inline aig_network strash( aig_network const& ntk )
{
  const auto seen = reachable_nodes( ntk );
  aig_builder b( ntk.num_inputs() );
  std::vector<literal> map( ntk.num_nodes() );
  map[0] = const0;
  for ( node_id n = 1; n <= ntk.num_inputs(); ++n )
    map[n] = make_literal( n );
  for ( node_id n = ntk.first_gate(); n < ntk.num_nodes(); ++n )
  {
    if ( !seen[n] )
      continue;
    auto const& g = ntk.gate( n );
    map[n] = b.create_and( negate_if( map[node_of( g.fanin0 )], is_complemented( g.fanin0 ) ),
                           negate_if( map[node_of( g.fanin1 )], is_complemented( g.fanin1 ) ) );
  }
  for ( auto o : ntk.outputs() )
    b.add_output( negate_if( map[node_of( o )], is_complemented( o ) ) );
  return std::move( b ).build();
}

namespace detail
{

inline bool parse_unsigned( std::string_view tok, std::uint64_t& out )
{
  if ( tok.empty() )
    return false;
  out = 0;
  for ( char c : tok )
  {
    if ( c < '0' || c > '9' )
      return false;
    out = out * 10 + static_cast<std::uint64_t>( c - '0' );
    if ( out > ( std::uint64_t{ 1 } << 40 ) )
      return false;
  }
  return true;
}

inline std::vector<std::string_view> split_ws( std::string_view line )
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while ( i < line.size() )
  {
    while ( i < line.size() && ( line[i] == ' ' || line[i] == '\t' || line[i] == '\r' ) )
      ++i;
    auto j = i;
    while ( j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' )
      ++j;
    if ( j > i )
      out.push_back( line.substr( i, j - i ) );
    i = j;
  }
  return out;
}

} // namespace detail

/*! \brief Reads combinational ASCII AIGER (`aag M I 0 O A`).

  Gates may appear in any order; the result is structurally hashed and
  constant-propagated unless `hash` is false, in which case the gate list
  is kept verbatim (after topological re-ordering).
*/
inline aig_network parse_aiger_ascii( std::string_view text, bool hash = true )
{
  std::vector<std::string_view> lines;
  for ( std::size_t pos = 0; pos <= text.size(); )
  {
    auto end = text.find( '\n', pos );
    if ( end == std::string_view::npos )
      end = text.size();
    lines.push_back( text.substr( pos, end - pos ) );
    pos = end + 1;
  }

  if ( lines.empty() )
    throw aiger_parse_error( 1, "empty input" );
  auto header = detail::split_ws( lines[0] );
  if ( header.size() != 6 || header[0] != "aag" )
    throw aiger_parse_error( 1, "expected header 'aag M I L O A'" );
  std::uint64_t hv[5];
  for ( int i = 0; i < 5; ++i )
    if ( !detail::parse_unsigned( header[1 + i], hv[i] ) )
      throw aiger_parse_error( 1, "malformed header field '" + std::string( header[1 + i] ) + "'" );
  const auto m = hv[0], ni = hv[1], nl = hv[2], no = hv[3], na = hv[4];
  if ( nl != 0 )
    throw aiger_parse_error( 1, "latches are not supported (combinational circuits only)" );
  if ( m < ni + na )
    throw aiger_parse_error( 1, "M smaller than I + L + A" );
  if ( lines.size() < 1 + ni + no + na )
    throw aiger_parse_error( lines.size(), "unexpected end of file" );

  enum class kind : std::uint8_t
  {
    undefined,
    input,
    gate
  };
  std::vector<kind> kinds( m + 1, kind::undefined );
  std::vector<std::uint32_t> input_index( m + 1, 0 );
  std::vector<std::pair<std::uint64_t, std::uint64_t>> fanins( m + 1 );
  std::vector<std::size_t> def_line( m + 1, 0 );
  kinds[0] = kind::input; /* constant, handled specially */

  auto read_literal = [&]( std::string_view tok, std::size_t line_no ) {
    std::uint64_t v;
    if ( !detail::parse_unsigned( tok, v ) )
      throw aiger_parse_error( line_no, "malformed literal '" + std::string( tok ) + "'" );
    if ( ( v >> 1 ) > m )
      throw aiger_parse_error( line_no, "literal " + std::to_string( v ) + " exceeds maximum variable index" );
    return v;
  };

  std::size_t ln = 1;
  for ( std::uint64_t i = 0; i < ni; ++i, ++ln )
  {
    auto t = detail::split_ws( lines[ln] );
    if ( t.size() != 1 )
      throw aiger_parse_error( ln + 1, "expected one input literal" );
    auto l = read_literal( t[0], ln + 1 );
    if ( l < 2 || ( l & 1 ) || kinds[l >> 1] != kind::undefined )
      throw aiger_parse_error( ln + 1, "invalid or duplicate input literal" );
    kinds[l >> 1] = kind::input;
    input_index[l >> 1] = static_cast<std::uint32_t>( i );
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> outputs;
  for ( std::uint64_t i = 0; i < no; ++i, ++ln )
  {
    auto t = detail::split_ws( lines[ln] );
    if ( t.size() != 1 )
      throw aiger_parse_error( ln + 1, "expected one output literal" );
    outputs.emplace_back( read_literal( t[0], ln + 1 ), ln + 1 );
  }
  for ( std::uint64_t i = 0; i < na; ++i, ++ln )
  {
    auto t = detail::split_ws( lines[ln] );
    if ( t.size() != 3 )
      throw aiger_parse_error( ln + 1, "expected and-gate 'lhs rhs0 rhs1'" );
    auto lhs = read_literal( t[0], ln + 1 );
    if ( lhs < 2 || ( lhs & 1 ) || kinds[lhs >> 1] != kind::undefined )
      throw aiger_parse_error( ln + 1, "invalid or duplicate gate output literal" );
    kinds[lhs >> 1] = kind::gate;
    fanins[lhs >> 1] = { read_literal( t[1], ln + 1 ), read_literal( t[2], ln + 1 ) };
    def_line[lhs >> 1] = ln + 1;
  }

  for ( std::uint64_t v = 1; v <= m; ++v )
    if ( kinds[v] == kind::gate )
      for ( auto f : { fanins[v].first, fanins[v].second } )
        if ( kinds[f >> 1] == kind::undefined )
          throw aiger_parse_error( def_line[v], "dangling literal " + std::to_string( f ) );
  for ( auto [o, line_no] : outputs )
    if ( kinds[o >> 1] == kind::undefined )
      throw aiger_parse_error( line_no, "dangling output literal " + std::to_string( o ) );

  /* topological order by depth-first search from each gate in variable order */
  std::vector<literal> map( m + 1, 0 );
  std::vector<std::uint8_t> state( m + 1, 0 ); /* 0 new, 1 on stack, 2 done */
  std::vector<and_gate> raw_gates;
  aig_builder builder( static_cast<std::uint32_t>( ni ) );
  for ( std::uint64_t v = 0; v <= m; ++v )
    if ( kinds[v] == kind::input )
    {
      map[v] = v == 0 ? const0 : make_literal( 1 + input_index[v] );
      state[v] = 2;
    }

  auto mapped = [&]( std::uint64_t lit ) { return negate_if( map[lit >> 1], lit & 1 ); };
  std::vector<std::uint64_t> stack;
  for ( std::uint64_t root = 1; root <= m; ++root )
  {
    if ( kinds[root] != kind::gate || state[root] == 2 )
      continue;
    stack.push_back( root );
    while ( !stack.empty() )
    {
      auto v = stack.back();
      if ( state[v] == 2 )
      {
        stack.pop_back();
        continue;
      }
      if ( state[v] == 0 )
      {
        state[v] = 1;
        for ( auto f : { fanins[v].second, fanins[v].first } )
        {
          auto fv = f >> 1;
          if ( state[fv] == 1 )
            throw aiger_parse_error( def_line[v], "combinational cycle through variable " + std::to_string( fv ) );
          if ( state[fv] == 0 )
            stack.push_back( fv );
        }
        continue;
      }
      stack.pop_back();
      const auto a = mapped( fanins[v].first );
      const auto b = mapped( fanins[v].second );
      if ( hash )
        map[v] = builder.create_and( a, b );
      else
      {
        map[v] = make_literal( static_cast<node_id>( 1 + ni + raw_gates.size() ) );
        raw_gates.push_back( { std::min( a, b ), std::max( a, b ) } );
      }
      state[v] = 2;
    }
  }

  std::vector<literal> outs;
  for ( auto [o, line_no] : outputs )
    outs.push_back( mapped( o ) );
  if ( !hash )
    return aig_network::from_raw( static_cast<std::uint32_t>( ni ), std::move( raw_gates ), std::move( outs ) );
  for ( auto o : outs )
    builder.add_output( o );
  return std::move( builder ).build();
}

inline std::string write_aiger_ascii( aig_network const& ntk )
{
  std::ostringstream os;
  os << "aag " << ntk.num_nodes() - 1 << ' ' << ntk.num_inputs() << " 0 " << ntk.num_outputs() << ' '
     << ntk.num_gates() << '\n';
  for ( std::uint32_t i = 0; i < ntk.num_inputs(); ++i )
    os << ntk.input( i ) << '\n';
  for ( auto o : ntk.outputs() )
    os << o << '\n';
  for ( node_id n = ntk.first_gate(); n < ntk.num_nodes(); ++n )
  {
    auto const& g = ntk.gate( n );
    os << make_literal( n ) << ' ' << g.fanin1 << ' ' << g.fanin0 << '\n';
  }
  return os.str();
}

/*! \brief Exhaustive word-parallel simulation.

  Returns one truth table per output, 2^I bits packed into 64-bit words
  (pattern p sets input i to bit i of p).
*/
inline std::vector<std::vector<std::uint64_t>> simulate( aig_network const& ntk )
{
  const auto ni = ntk.num_inputs();
  if ( ni > 20 )
    throw std::domain_error( "simulate: too many inputs for exhaustive simulation" );
  const std::size_t patterns = std::size_t{ 1 } << ni;
  const std::size_t words = std::max<std::size_t>( 1, patterns / 64 );
  const std::uint64_t tail_mask = patterns >= 64 ? ~std::uint64_t{ 0 } : ( ( std::uint64_t{ 1 } << patterns ) - 1 );

  std::vector<std::uint64_t> values( ntk.num_nodes() * words, 0 );
  for ( std::uint32_t i = 0; i < ni; ++i )
  {
    auto* v = values.data() + ( 1 + i ) * words;
    for ( std::size_t w = 0; w < words; ++w )
    {
      std::uint64_t word = 0;
      for ( std::size_t b = 0; b < 64; ++b )
        if ( ( ( ( w * 64 + b ) >> i ) & 1 ) != 0 )
          word |= std::uint64_t{ 1 } << b;
      v[w] = word;
    }
  }
  for ( node_id n = ntk.first_gate(); n < ntk.num_nodes(); ++n )
  {
    auto const& g = ntk.gate( n );
    auto const* a = values.data() + node_of( g.fanin0 ) * words;
    auto const* b = values.data() + node_of( g.fanin1 ) * words;
    const std::uint64_t ma = is_complemented( g.fanin0 ) ? ~std::uint64_t{ 0 } : 0;
    const std::uint64_t mb = is_complemented( g.fanin1 ) ? ~std::uint64_t{ 0 } : 0;
    auto* out = values.data() + n * words;
    for ( std::size_t w = 0; w < words; ++w )
      out[w] = ( a[w] ^ ma ) & ( b[w] ^ mb );
  }

  std::vector<std::vector<std::uint64_t>> result;
  for ( auto o : ntk.outputs() )
  {
    auto const* v = values.data() + node_of( o ) * words;
    std::vector<std::uint64_t> tt( v, v + words );
    if ( is_complemented( o ) )
      for ( auto& w : tt )
        w = ~w;
    tt.back() &= tail_mask;
    result.push_back( std::move( tt ) );
  }
  return result;
}

/*! \brief True iff both networks compute the same outputs on all 2^I patterns (I <= 16). */
inline bool equivalence_check( aig_network const& a, aig_network const& b )
{
  if ( a.num_inputs() > 16 || b.num_inputs() > 16 )
    throw std::domain_error( "equivalence_check: more than 16 inputs is unsupported" );
  if ( a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() )
    throw std::domain_error( "equivalence_check: interface mismatch" );
  return simulate( a ) == simulate( b );
}

} // namespace boils
