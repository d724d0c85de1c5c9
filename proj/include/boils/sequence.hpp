/*!
  \file sequence.hpp
  \brief Categorical sequence search space: alphabets, sequences, Hamming
         geometry and seeded samplers.
*/

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace boils
{

using symbol = std::uint32_t;

/*! \brief Ordered set of operation tokens; index <-> token is a bijection. */
class alphabet
{
public:
  alphabet() = default;

  explicit alphabet( std::vector<std::string> tokens )
      : tokens_( std::move( tokens ) )
  {
    if ( tokens_.empty() )
      throw std::domain_error( "alphabet: empty token list" );
    for ( symbol i = 0; i < tokens_.size(); ++i )
    {
      if ( tokens_[i].empty() || tokens_[i].find( ';' ) != std::string::npos )
        throw std::domain_error( "alphabet: invalid token '" + tokens_[i] + "'" );
      if ( !index_.emplace( tokens_[i], i ).second )
        throw std::domain_error( "alphabet: duplicate token '" + tokens_[i] + "'" );
    }
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  std::string const& token( symbol s ) const { return tokens_.at( s ); }
  std::vector<std::string> const& tokens() const noexcept { return tokens_; }

  symbol index_of( std::string_view token ) const
  {
    auto it = index_.find( std::string( token ) );
    if ( it == index_.end() )
      throw std::domain_error( "alphabet: unknown token '" + std::string( token ) + "'" );
    return it->second;
  }

  bool contains( std::string_view token ) const { return index_.count( std::string( token ) ) != 0; }

  bool operator==( alphabet const& other ) const { return tokens_ == other.tokens_; }

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, symbol> index_;
};

/*! \brief A fixed-length vector of alphabet indices. */
struct sequence
{
  std::vector<symbol> ops;

  sequence() = default;
  explicit sequence( std::vector<symbol> o ) : ops( std::move( o ) ) {}
  sequence( std::initializer_list<symbol> o ) : ops( o ) {}

  std::size_t size() const noexcept { return ops.size(); }
  symbol operator[]( std::size_t i ) const { return ops[i]; }
  symbol& operator[]( std::size_t i ) { return ops[i]; }
  auto begin() const noexcept { return ops.begin(); }
  auto end() const noexcept { return ops.end(); }
  operator std::span<const symbol>() const noexcept { return ops; }

  auto operator<=>( sequence const& ) const = default;
  bool operator==( sequence const& ) const = default;
};

struct sequence_hash
{
  std::size_t operator()( sequence const& s ) const noexcept
  {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for ( auto v : s.ops )
    {
      h ^= v + 1;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>( h );
  }
};

/*! \brief Deterministic 64-bit generator.

  Wraps `std::mt19937_64` (whose output stream is fixed by the standard) and
  implements its own integer/real reductions so that draws are identical
  across standard library implementations.
*/
class rng
{
public:
  explicit rng( std::uint64_t seed = 0 ) : seed_( seed ), engine_( seed ) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  /* uniform in [0, n), rejection sampling */
  std::uint64_t uniform_index( std::uint64_t n )
  {
    if ( n == 0 )
      throw std::domain_error( "rng: empty range" );
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do
    {
      x = engine_();
    } while ( x >= limit );
    return x % n;
  }

  /* uniform in [0, 1) with 53 random bits */
  double uniform_real() { return static_cast<double>( engine_() >> 11 ) * 0x1.0p-53; }

  bool bernoulli( double p ) { return uniform_real() < p; }

  template<typename T>
  void shuffle( std::vector<T>& v )
  {
    for ( std::size_t i = v.size(); i > 1; --i )
      std::swap( v[i - 1], v[uniform_index( i )] );
  }

  /* derive an independent stream, e.g. for a per-seed worker */
  rng split() { return rng( engine_() ^ 0x9e3779b97f4a7c15ull ); }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/*! \brief Number of positions where `a` and `b` differ. */
inline std::size_t hamming( std::span<const symbol> a, std::span<const symbol> b )
{
  if ( a.size() != b.size() )
    throw std::domain_error( "hamming: length mismatch" );
  std::size_t d = 0;
  for ( std::size_t i = 0; i < a.size(); ++i )
    d += a[i] != b[i];
  return d;
}

inline sequence random_sequence( rng& gen, alphabet const& alpha, std::size_t k )
{
  if ( alpha.empty() )
    throw std::domain_error( "random_sequence: empty alphabet" );
  if ( k == 0 )
    throw std::domain_error( "random_sequence: k must be >= 1" );
  sequence s;
  s.ops.resize( k );
  for ( auto& v : s.ops )
    v = static_cast<symbol>( gen.uniform_index( alpha.size() ) );
  return s;
}

/*! \brief Per-position stratified sampler (categorical Latin hypercube).

  At every position the n draws contain each symbol floor(n/|A|) or
  ceil(n/|A|) times; the remainder symbols are a uniform random subset and
  every position is shuffled independently.
*/
inline std::vector<sequence> stratified_sample( rng& gen, std::size_t n, alphabet const& alpha, std::size_t k )
{
  if ( n == 0 )
    throw std::domain_error( "stratified_sample: n must be >= 1" );
  if ( alpha.empty() )
    throw std::domain_error( "stratified_sample: empty alphabet" );

  const auto a = alpha.size();
  std::vector<sequence> out( n, sequence( std::vector<symbol>( k ) ) );
  std::vector<symbol> column;
  std::vector<symbol> extra( a );
  for ( std::size_t pos = 0; pos < k; ++pos )
  {
    column.clear();
    for ( std::size_t r = 0; r < n / a; ++r )
      for ( symbol s = 0; s < a; ++s )
        column.push_back( s );
    std::iota( extra.begin(), extra.end(), symbol{ 0 } );
    gen.shuffle( extra );
    column.insert( column.end(), extra.begin(), extra.begin() + static_cast<std::ptrdiff_t>( n % a ) );
    gen.shuffle( column );
    for ( std::size_t i = 0; i < n; ++i )
      out[i][pos] = column[i];
  }
  return out;
}

namespace detail
{

/* uniform symbol different from `s` */
inline symbol resample_other( rng& gen, symbol s, std::size_t alphabet_size )
{
  auto r = static_cast<symbol>( gen.uniform_index( alphabet_size - 1 ) );
  return r >= s ? r + 1 : r;
}

} // namespace detail

/*! \brief Random point of the Hamming ball around `center`.

  Draws a distance d uniformly from {0..radius}, picks d distinct positions
  and moves each to a different symbol. Radius is clamped to the length.
*/
inline sequence random_point_in_ball( rng& gen, sequence const& center, std::size_t radius, alphabet const& alpha )
{
  if ( alpha.empty() )
    throw std::domain_error( "random_point_in_ball: empty alphabet" );
  const auto k = center.size();
  radius = std::min( radius, k );
  const auto d = static_cast<std::size_t>( gen.uniform_index( radius + 1 ) );
  sequence out = center;
  if ( d == 0 || alpha.size() < 2 )
    return out;

  std::vector<std::size_t> positions( k );
  std::iota( positions.begin(), positions.end(), std::size_t{ 0 } );
  for ( std::size_t i = 0; i < d; ++i )
  {
    auto j = i + gen.uniform_index( k - i );
    std::swap( positions[i], positions[j] );
    out[positions[i]] = detail::resample_other( gen, center[positions[i]], alpha.size() );
  }
  return out;
}

/*! \brief Uniform Hamming-1 move from `current` that stays inside the ball.

  Returns `current` unchanged when no feasible neighbour exists.
*/
inline sequence random_neighbor_in_ball( rng& gen, sequence const& current, sequence const& center, std::size_t radius,
                                         alphabet const& alpha )
{
  const auto k = current.size();
  const auto a = alpha.size();
  const auto dist = hamming( current, center );
  radius = std::min( radius, k );
  if ( a < 2 )
    return current;

  /* move classes: leave the center symbol (dist+1), return to it (dist-1), or swap between two off-center symbols (dist) */
  const std::size_t same = k - dist;
  const std::uint64_t n_away = dist + 1 <= radius ? same * ( a - 1 ) : 0;
  const std::uint64_t n_back = dist >= 1 && dist - 1 <= radius ? dist : 0;
  const std::uint64_t n_side = dist <= radius ? dist * ( a - 2 ) : 0;
  const auto total = n_away + n_back + n_side;
  if ( total == 0 )
    return current;

  auto r = gen.uniform_index( total );
  sequence out = current;
  auto nth_position = [&]( bool differing, std::size_t idx ) {
    for ( std::size_t i = 0; i < k; ++i )
      if ( ( current[i] != center[i] ) == differing && idx-- == 0 )
        return i;
    return k; // unreachable
  };

  if ( r < n_away )
  {
    auto pos = nth_position( false, r / ( a - 1 ) );
    auto s = static_cast<symbol>( r % ( a - 1 ) );
    out[pos] = s >= current[pos] ? s + 1 : s;
  }
  else if ( ( r -= n_away ) < n_back )
  {
    auto pos = nth_position( true, r );
    out[pos] = center[pos];
  }
  else
  {
    r -= n_back;
    auto pos = nth_position( true, r / ( a - 2 ) );
    /* uniform over symbols other than current[pos] and center[pos] */
    auto lo = std::min( current[pos], center[pos] );
    auto hi = std::max( current[pos], center[pos] );
    auto s = static_cast<symbol>( r % ( a - 2 ) );
    if ( s >= lo )
      ++s;
    if ( s >= hi )
      ++s;
    out[pos] = s;
  }
  return out;
}

/* text form: tokens joined by ';' */
inline std::string to_text( sequence const& s, alphabet const& alpha )
{
  std::string out;
  for ( std::size_t i = 0; i < s.size(); ++i )
  {
    if ( i )
      out += ';';
    out += alpha.token( s[i] );
  }
  return out;
}

inline sequence parse_sequence( std::string_view text, alphabet const& alpha )
{
  sequence s;
  if ( text.empty() )
    return s;
  std::size_t start = 0;
  while ( true )
  {
    auto end = text.find( ';', start );
    s.ops.push_back( alpha.index_of( text.substr( start, end == std::string_view::npos ? std::string_view::npos : end - start ) ) );
    if ( end == std::string_view::npos )
      break;
    start = end + 1;
  }
  return s;
}

} // namespace boils
