// Regenerates the bundled benchmark circuits under circuits/.

#include <boils/aig.hpp>
#include <boils/sequence.hpp>

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace boils;

namespace
{

/* majority written as a two-level sum of products */
literal majority( aig_builder& b, literal x, literal y, literal z )
{
  return b.create_or( b.create_or( b.create_and( x, y ), b.create_and( x, z ) ), b.create_and( y, z ) );
}

aig_network ripple_adder( std::uint32_t bits )
{
  aig_builder b( 2 * bits + 1 );
  literal carry = b.input( 2 * bits );
  std::vector<literal> sums;
  for ( std::uint32_t i = 0; i < bits; ++i )
  {
    const auto x = b.input( i ), y = b.input( bits + i );
    sums.push_back( b.create_xor( b.create_xor( x, y ), carry ) );
    carry = majority( b, x, y, carry );
  }
  for ( auto s : sums )
    b.add_output( s );
  b.add_output( carry );
  return std::move( b ).build();
}

/* a < b and a == b written flat: each less-than term rebuilds its own
   chain of higher-bit equalities, and equality is a two-level xnor */
aig_network comparator( std::uint32_t bits )
{
  aig_builder b( 2 * bits );
  auto xnor = [&]( literal x, literal y ) { return b.create_or( b.create_and( x, y ), b.create_and( negate( x ), negate( y ) ) ); };
  literal less = const0, equal = const1;
  for ( std::uint32_t i = 0; i < bits; ++i )
  {
    literal term = b.create_and( negate( b.input( i ) ), b.input( bits + i ) );
    for ( auto j = i + 1; j < bits; ++j )
      term = b.create_and( term, xnor( b.input( j ), b.input( bits + j ) ) );
    less = b.create_or( less, term );
    equal = b.create_and( xnor( b.input( i ), b.input( bits + i ) ), equal );
  }
  b.add_output( less );
  b.add_output( equal );
  return std::move( b ).build();
}

/* 8:1 multiplexer written as a flat sum of minterm-guarded data bits */
aig_network mux_tree()
{
  aig_builder b( 11 );
  literal out = const0;
  for ( std::uint32_t d = 0; d < 8; ++d )
  {
    literal term = b.input( 3 + d );
    for ( std::uint32_t s = 0; s < 3; ++s )
      term = b.create_and( term, negate_if( b.input( s ), ( ( d >> s ) & 1 ) == 0 ) );
    out = b.create_or( out, term );
  }
  b.add_output( out );
  return std::move( b ).build();
}

/* parity of each group of up to four inputs as a sum of odd minterms, groups chained by xor */
aig_network parity_chain( std::uint32_t n )
{
  aig_builder b( n );
  literal acc = const0;
  for ( std::uint32_t lo = 0; lo < n; lo += 4 )
  {
    const auto width = std::min<std::uint32_t>( 4, n - lo );
    literal group = const0;
    for ( std::uint32_t m = 0; m < ( 1u << width ); ++m )
    {
      if ( std::popcount( m ) % 2 == 0 )
        continue;
      literal cube = const1;
      for ( std::uint32_t i = 0; i < width; ++i )
        cube = b.create_and( cube, negate_if( b.input( lo + i ), ( ( m >> i ) & 1 ) == 0 ) );
      group = b.create_or( group, cube );
    }
    acc = lo == 0 ? group : b.create_xor( acc, group );
  }
  b.add_output( acc );
  return std::move( b ).build();
}

/* unsigned array multiplier with ripple rows */
aig_network multiplier( std::uint32_t bits )
{
  aig_builder b( 2 * bits );
  std::vector<literal> acc( 2 * bits, const0 );
  for ( std::uint32_t j = 0; j < bits; ++j )
  {
    literal carry = const0;
    for ( std::uint32_t i = 0; i < bits; ++i )
    {
      const auto pp = b.create_and( b.input( i ), b.input( bits + j ) );
      const auto s = acc[i + j];
      acc[i + j] = b.create_xor( b.create_xor( s, pp ), carry );
      carry = majority( b, s, pp, carry );
    }
    for ( auto k = j + bits; k < 2 * bits && carry != const0; ++k )
    {
      const auto s = acc[k];
      acc[k] = b.create_xor( s, carry );
      carry = b.create_and( s, carry );
    }
  }
  for ( auto o : acc )
    b.add_output( o );
  return std::move( b ).build();
}

aig_network random_dag( std::uint32_t inputs, std::uint32_t gates, std::uint32_t outputs, std::uint64_t seed )
{
  rng gen( seed );
  aig_builder b( inputs );
  std::vector<literal> pool;
  for ( std::uint32_t i = 0; i < inputs; ++i )
    pool.push_back( b.input( i ) );
  while ( pool.size() < inputs + gates )
  {
    /* bias towards recent signals for depth */
    auto pick = [&] {
      const auto n = pool.size();
      const auto window = std::min<std::size_t>( n, 16 );
      const auto idx = gen.bernoulli( 0.7 ) ? n - 1 - gen.uniform_index( window ) : gen.uniform_index( n );
      return negate_if( pool[idx], gen.bernoulli( 0.5 ) );
    };
    const auto l = b.create_and( pick(), pick() );
    if ( node_of( l ) > inputs && l != pool.back() )
      pool.push_back( make_literal( node_of( l ) ) );
  }
  for ( std::uint32_t o = 0; o < outputs; ++o )
    b.add_output( negate_if( pool[pool.size() - 1 - 3 * o], o % 2 == 1 ) );
  return std::move( b ).build();
}

/* random two-level sum of products with overlapping cubes */
aig_network random_sop( std::uint32_t inputs, std::uint32_t cubes, std::uint32_t outputs, std::uint64_t seed )
{
  rng gen( seed );
  aig_builder b( inputs );
  std::vector<literal> terms;
  for ( std::uint32_t c = 0; c < cubes; ++c )
  {
    literal t = const1;
    for ( std::uint32_t i = 0; i < inputs; ++i )
      if ( gen.bernoulli( 0.45 ) )
        t = b.create_and( t, negate_if( b.input( i ), gen.bernoulli( 0.5 ) ) );
    terms.push_back( t );
  }
  for ( std::uint32_t o = 0; o < outputs; ++o )
  {
    literal f = const0;
    for ( auto t : terms )
      if ( gen.bernoulli( 0.4 ) )
        f = b.create_or( f, t );
    b.add_output( f );
  }
  return std::move( b ).build();
}

} // namespace

int main( int argc, char** argv )
{
  const std::filesystem::path dir = argc > 1 ? argv[1] : "circuits";
  std::filesystem::create_directories( dir );
  const std::vector<std::pair<std::string, std::function<aig_network()>>> circuits{
      { "adder5", [] { return ripple_adder( 5 ); } },
      { "cmp6", [] { return comparator( 6 ); } },
      { "mux8", [] { return mux_tree(); } },
      { "parity10", [] { return parity_chain( 10 ); } },
      { "mult5", [] { return multiplier( 5 ); } },
      { "mult6", [] { return multiplier( 6 ); } },
      { "dag12", [] { return random_dag( 12, 400, 8, 7 ); } },
      { "sop10", [] { return random_sop( 10, 30, 4, 11 ); } },
  };
  for ( auto const& [name, make] : circuits )
  {
    const auto ntk = make();
    std::ofstream( dir / ( name + ".aag" ) ) << write_aiger_ascii( ntk );
    const auto s = stats( ntk );
    std::cout << name << ": inputs " << ntk.num_inputs() << " area " << s.area << " delay " << s.delay << '\n';
  }
}
