/*!
  \file passes.hpp
  \brief Function-preserving AIG transformations: balance, rewrite,
         refactor and resub, each with a zero-cost variant except balance.

  rewrite, refactor and resub share one driver: nodes are visited in
  topological order, a finder proposes a replacement recipe for the node,
  and the network is rebuilt with the substitution. Non-z variants keep the
  result only if the reachable area strictly drops, -z variants also keep
  area-neutral structural changes.
*/

#pragma once

#include "aig.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace boils
{

class unsupported_pass : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

inline std::vector<std::string> const& native_pass_tokens()
{
  static const std::vector<std::string> tokens{ "rewrite", "rewrite -z", "refactor", "refactor -z",
                                                "resub",   "resub -z",   "balance" };
  return tokens;
}

/* valid only against an external oracle */
inline std::vector<std::string> const& oracle_pass_tokens()
{
  static const std::vector<std::string> tokens{ "fraig", "sopb", "blut", "dsdb" };
  return tokens;
}

namespace detail
{

struct network_view
{
  explicit network_view( aig_network const& n ) : ntk( &n ), refs( n.num_nodes(), 0 ), fanouts( n.num_nodes() )
  {
    const auto seen = reachable_nodes( n );
    table.reserve( n.num_gates() * 2 );
    for ( node_id m = n.first_gate(); m < n.num_nodes(); ++m )
    {
      auto const& g = n.gate( m );
      table.emplace( key( g.fanin0, g.fanin1 ), m );
      if ( !seen[m] )
        continue;
      for ( auto f : { g.fanin0, g.fanin1 } )
      {
        ++refs[node_of( f )];
        fanouts[node_of( f )].push_back( m );
      }
    }
    for ( auto o : n.outputs() )
      ++refs[node_of( o )];
  }

  static std::uint64_t key( literal a, literal b )
  {
    if ( a > b )
      std::swap( a, b );
    return ( static_cast<std::uint64_t>( a ) << 32 ) | b;
  }

  /* result literal of a & b when it needs no new node */
  std::optional<literal> lookup( literal a, literal b ) const
  {
    if ( a == const0 || b == const0 || a == negate( b ) )
      return const0;
    if ( a == const1 )
      return b;
    if ( b == const1 || a == b )
      return a;
    auto it = table.find( key( a, b ) );
    if ( it == table.end() )
      return std::nullopt;
    return make_literal( it->second );
  }

  bool is_and( node_id m ) const { return ntk->is_and( m ); }
  and_gate const& gate( node_id m ) const { return ntk->gate( m ); }

  aig_network const* ntk;
  std::vector<std::uint32_t> refs;
  std::vector<std::vector<node_id>> fanouts;
  std::unordered_map<std::uint64_t, node_id> table;
};

/* a small AND network over literals of the current graph */
struct recipe
{
  struct operand
  {
    std::uint32_t index = 0;
    bool step = false; /* index into steps, otherwise into leaves */
    bool complemented = false;

    operand operator!() const { return { index, step, !complemented }; }
    bool operator==( operand const& ) const = default;
  };

  std::vector<literal> leaves;
  std::vector<std::pair<operand, operand>> steps;
  operand output;
};

class recipe_builder
{
public:
  using operand = recipe::operand;

  operand leaf( literal l )
  {
    const auto base = l & ~1u;
    auto it = std::find( r_.leaves.begin(), r_.leaves.end(), base );
    if ( it == r_.leaves.end() )
    {
      r_.leaves.push_back( base );
      it = r_.leaves.end() - 1;
    }
    return { static_cast<std::uint32_t>( it - r_.leaves.begin() ), false, is_complemented( l ) };
  }

  operand and_( operand a, operand b )
  {
    for ( std::size_t i = 0; i < r_.steps.size(); ++i )
    {
      auto const& [x, y] = r_.steps[i];
      if ( ( x == a && y == b ) || ( x == b && y == a ) )
        return { static_cast<std::uint32_t>( i ), true, false };
    }
    r_.steps.emplace_back( a, b );
    return { static_cast<std::uint32_t>( r_.steps.size() - 1 ), true, false };
  }

  operand or_( operand a, operand b ) { return !and_( !a, !b ); }

  recipe finish( operand out ) &&
  {
    r_.output = out;
    return std::move( r_ );
  }

private:
  recipe r_;
};

inline recipe literal_recipe( literal l )
{
  recipe_builder b;
  auto o = b.leaf( l );
  return std::move( b ).finish( o );
}

inline bool in_list( std::vector<node_id> const& v, node_id n ) { return std::find( v.begin(), v.end(), n ) != v.end(); }

/* dereferences the cone of `n`, stopping at `stop` nodes; returns the MFFC size and optionally collects its members */
inline std::uint32_t deref_node( network_view& v, node_id n, std::vector<node_id> const* stop = nullptr,
                                 std::vector<node_id>* members = nullptr )
{
  if ( members )
    members->push_back( n );
  std::uint32_t count = 1;
  auto const& g = v.gate( n );
  for ( auto f : { g.fanin0, g.fanin1 } )
  {
    const auto m = node_of( f );
    if ( !v.is_and( m ) || ( stop && in_list( *stop, m ) ) )
      continue;
    if ( --v.refs[m] == 0 )
      count += deref_node( v, m, stop, members );
  }
  return count;
}

inline void ref_node( network_view& v, node_id n, std::vector<node_id> const* stop = nullptr )
{
  auto const& g = v.gate( n );
  for ( auto f : { g.fanin0, g.fanin1 } )
  {
    const auto m = node_of( f );
    if ( !v.is_and( m ) || ( stop && in_list( *stop, m ) ) )
      continue;
    if ( v.refs[m]++ == 0 )
      ref_node( v, m, stop );
  }
}

/* nodes a recipe would add, given refs with the target's MFFC dereferenced; nullopt if it reproduces `target` */
inline std::optional<std::uint32_t> count_added( network_view const& v, recipe const& r, node_id target )
{
  std::vector<std::optional<literal>> vals( r.steps.size() );
  auto resolve = [&]( recipe::operand o ) -> std::optional<literal> {
    std::optional<literal> l = o.step ? vals[o.index] : std::optional<literal>( r.leaves[o.index] );
    if ( l )
      return negate_if( *l, o.complemented );
    return std::nullopt;
  };

  std::uint32_t added = 0;
  for ( std::size_t i = 0; i < r.steps.size(); ++i )
  {
    auto a = resolve( r.steps[i].first );
    auto b = resolve( r.steps[i].second );
    if ( a && b )
      if ( auto l = v.lookup( *a, *b ) )
      {
        const auto m = node_of( *l );
        if ( v.is_and( m ) && v.refs[m] == 0 && m != target )
          ++added; /* revives a node of the freed cone */
        vals[i] = *l;
        continue;
      }
    ++added;
  }
  if ( auto out = resolve( r.output ); out && node_of( *out ) == target )
    return std::nullopt;
  return added;
}

struct substitution
{
  aig_network ntk;
  node_id resume_at; /* first node whose original index exceeded the target */
};

/* rebuilds `ntk` with `target` replaced by the recipe, dropping dead nodes */
inline substitution substitute( aig_network const& ntk, node_id target, recipe const& r )
{
  const auto n = ntk.num_nodes();
  constexpr literal unset = ~literal{ 0 };

  std::vector<bool> needed( n, false );
  std::vector<node_id> stack;
  for ( auto o : ntk.outputs() )
    stack.push_back( node_of( o ) );
  while ( !stack.empty() )
  {
    auto m = stack.back();
    stack.pop_back();
    if ( needed[m] )
      continue;
    needed[m] = true;
    if ( m == target )
      for ( auto l : r.leaves )
        stack.push_back( node_of( l ) );
    else if ( ntk.is_and( m ) )
    {
      stack.push_back( node_of( ntk.gate( m ).fanin0 ) );
      stack.push_back( node_of( ntk.gate( m ).fanin1 ) );
    }
  }

  aig_builder b( ntk.num_inputs() );
  std::vector<literal> map( n, unset );
  map[0] = const0;
  for ( node_id i = 1; i <= ntk.num_inputs(); ++i )
    map[i] = make_literal( i );
  auto mapped = [&]( literal l ) { return negate_if( map[node_of( l )], is_complemented( l ) ); };

  auto build = [&]( auto&& self, node_id m ) -> void {
    if ( map[m] != unset )
      return;
    if ( m == target )
    {
      for ( auto l : r.leaves )
        self( self, node_of( l ) );
      std::vector<literal> vals( r.steps.size() );
      auto resolve = [&]( recipe::operand o ) {
        return negate_if( o.step ? vals[o.index] : mapped( r.leaves[o.index] ), o.complemented );
      };
      for ( std::size_t i = 0; i < r.steps.size(); ++i )
        vals[i] = b.create_and( resolve( r.steps[i].first ), resolve( r.steps[i].second ) );
      map[m] = resolve( r.output );
      return;
    }
    auto const& g = ntk.gate( m );
    self( self, node_of( g.fanin0 ) );
    self( self, node_of( g.fanin1 ) );
    map[m] = b.create_and( mapped( g.fanin0 ), mapped( g.fanin1 ) );
  };

  node_id resume = static_cast<node_id>( ntk.first_gate() );
  for ( node_id m = ntk.first_gate(); m < n; ++m )
  {
    if ( needed[m] )
      build( build, m );
    if ( m == target )
      resume = static_cast<node_id>( b.num_nodes() );
  }
  for ( auto o : ntk.outputs() )
    b.add_output( mapped( o ) );
  return { std::move( b ).build(), resume };
}

/* shared scan-substitute-verify loop */
template<typename Finder>
aig_network local_pass( aig_network const& input, bool zero_cost, Finder&& find )
{
  auto ntk = strash( input );
  auto area = stats( ntk ).area;
  auto view = std::make_unique<network_view>( ntk );
  node_id pos = ntk.first_gate();
  while ( pos < ntk.num_nodes() )
  {
    const node_id n = pos++;
    if ( view->refs[n] == 0 )
      continue;
    auto cand = find( *view, n, zero_cost );
    if ( !cand )
      continue;
    auto next = substitute( ntk, n, *cand );
    const auto next_area = stats( next.ntk ).area;
    if ( next_area < area || ( zero_cost && next_area == area && next.ntk != ntk ) )
    {
      ntk = std::move( next.ntk );
      area = next_area;
      view = std::make_unique<network_view>( ntk );
      pos = next.resume_at;
    }
  }
  return ntk;
}

/* best candidate by estimated gain = |MFFC| - added nodes */
inline std::optional<recipe> pick_candidate( network_view& v, node_id n, std::vector<recipe> const& cands, bool zero_cost,
                                             std::vector<node_id> const* stop = nullptr )
{
  if ( cands.empty() )
    return std::nullopt;
  const auto mffc = static_cast<long>( deref_node( v, n, stop ) );
  std::optional<std::size_t> best;
  long best_gain = 0;
  for ( std::size_t i = 0; i < cands.size(); ++i )
  {
    auto added = count_added( v, cands[i], n );
    if ( !added )
      continue;
    const long gain = mffc - static_cast<long>( *added );
    if ( ( !best && ( gain > 0 || ( zero_cost && gain == 0 ) ) ) || ( best && gain > best_gain ) )
    {
      best = i;
      best_gain = gain;
    }
  }
  ref_node( v, n, stop );
  if ( !best )
    return std::nullopt;
  return cands[*best];
}

/* ---------- rewrite ---------- */

inline std::optional<std::pair<literal, literal>> and_kids( network_view const& v, literal l )
{
  const auto m = node_of( l );
  if ( !v.is_and( m ) )
    return std::nullopt;
  return std::make_pair( v.gate( m ).fanin0, v.gate( m ).fanin1 );
}

inline std::vector<recipe> rewrite_candidates( network_view const& v, node_id n )
{
  std::vector<recipe> out;
  auto const& g = v.gate( n );

  for ( int side = 0; side < 2; ++side )
  {
    const literal x = side == 0 ? g.fanin0 : g.fanin1;
    const literal y = side == 0 ? g.fanin1 : g.fanin0;
    auto ky = and_kids( v, y );
    if ( !ky )
      continue;
    const auto [p, q] = *ky;
    if ( !is_complemented( y ) )
    {
      if ( p == x || q == x )
        out.push_back( literal_recipe( y ) );
      if ( p == negate( x ) || q == negate( x ) )
        out.push_back( literal_recipe( const0 ) );
    }
    else
    {
      if ( p == negate( x ) || q == negate( x ) )
        out.push_back( literal_recipe( x ) );
      for ( auto [shared, other] : { std::pair{ p, q }, std::pair{ q, p } } )
        if ( shared == x )
        {
          recipe_builder b;
          auto o = b.and_( b.leaf( x ), b.leaf( negate( other ) ) );
          out.push_back( std::move( b ).finish( o ) );
        }
    }
  }

  auto ka = and_kids( v, g.fanin0 );
  auto kb = and_kids( v, g.fanin1 );
  if ( !ka || !kb )
    return out;

  const bool ca = is_complemented( g.fanin0 ), cb = is_complemented( g.fanin1 );
  const std::array<literal, 2> pa{ ka->first, ka->second };
  const std::array<literal, 2> pb{ kb->first, kb->second };

  if ( !ca && !cb )
  {
    for ( auto s : pa )
      for ( auto t : pb )
        if ( s == negate( t ) )
          out.push_back( literal_recipe( const0 ) );
    for ( int i = 0; i < 2; ++i )
      for ( int j = 0; j < 2; ++j )
        if ( pa[i] == pb[j] )
        {
          recipe_builder b;
          auto o = b.and_( b.leaf( pa[i] ), b.and_( b.leaf( pa[1 - i] ), b.leaf( pb[1 - j] ) ) );
          out.push_back( std::move( b ).finish( o ) );
        }
    for ( int j = 0; j < 2; ++j )
    {
      recipe_builder b;
      auto o = b.and_( b.and_( b.leaf( pa[0] ), b.leaf( pb[j] ) ), b.and_( b.leaf( pa[1] ), b.leaf( pb[1 - j] ) ) );
      out.push_back( std::move( b ).finish( o ) );
    }
  }
  else if ( ca != cb )
  {
    const literal x = ca ? g.fanin1 : g.fanin0;
    auto const& px = ca ? pb : pa;
    auto const& py = ca ? pa : pb;
    bool implied = false;
    for ( auto t : py )
      for ( auto s : px )
        implied = implied || t == negate( s );
    if ( implied )
      out.push_back( literal_recipe( x ) );
    if ( ( py[0] == px[0] && py[1] == px[1] ) || ( py[0] == px[1] && py[1] == px[0] ) )
      out.push_back( literal_recipe( const0 ) );
    for ( int i = 0; i < 2; ++i )
      if ( py[i] == px[0] || py[i] == px[1] )
      {
        recipe_builder b;
        auto o = b.and_( b.leaf( x ), b.leaf( negate( py[1 - i] ) ) );
        out.push_back( std::move( b ).finish( o ) );
      }
  }
  else
  {
    for ( int i = 0; i < 2; ++i )
      for ( int j = 0; j < 2; ++j )
        if ( pa[i] == pb[j] )
        {
          const literal t = pa[i], u = pa[1 - i], w = pb[1 - j];
          if ( u == negate( w ) )
          {
            out.push_back( literal_recipe( negate( t ) ) );
            continue;
          }
          recipe_builder b;
          auto either = b.or_( b.leaf( u ), b.leaf( w ) );
          auto o = !b.and_( b.leaf( t ), either );
          out.push_back( std::move( b ).finish( o ) );
        }
  }
  return out;
}

/* ---------- truth tables over at most four leaves ---------- */

using tt4 = std::uint16_t;

inline constexpr std::array<tt4, 4> tt_vars{ 0xAAAA, 0xCCCC, 0xF0F0, 0xFF00 };

inline tt4 cofactor0( tt4 f, int i )
{
  const int s = 1 << i;
  const tt4 lo = static_cast<tt4>( f & ~tt_vars[i] );
  return static_cast<tt4>( lo | ( lo << s ) );
}

inline tt4 cofactor1( tt4 f, int i )
{
  const int s = 1 << i;
  const tt4 hi = static_cast<tt4>( f & tt_vars[i] );
  return static_cast<tt4>( hi | ( hi >> s ) );
}

/* truth table of `n` over `leaves`, memoised in `tts` */
inline tt4 cone_tt( network_view const& v, node_id n, std::vector<node_id> const& leaves,
                    std::unordered_map<node_id, tt4>& tts )
{
  if ( auto it = tts.find( n ); it != tts.end() )
    return it->second;
  for ( std::size_t i = 0; i < leaves.size(); ++i )
    if ( leaves[i] == n )
      return tts[n] = tt_vars[i];
  if ( n == 0 )
    return tts[n] = 0;
  if ( !v.is_and( n ) )
    throw std::logic_error( "cone_tt: cone escapes its leaves" );
  auto const& g = v.gate( n );
  tt4 a = cone_tt( v, node_of( g.fanin0 ), leaves, tts );
  tt4 b = cone_tt( v, node_of( g.fanin1 ), leaves, tts );
  if ( is_complemented( g.fanin0 ) )
    a = static_cast<tt4>( ~a );
  if ( is_complemented( g.fanin1 ) )
    b = static_cast<tt4>( ~b );
  return tts[n] = static_cast<tt4>( a & b );
}

/* ---------- Shannon resynthesis ---------- */

struct shannon_entry
{
  int cost;
  int var; /* -1 for constants and literals */
};

inline shannon_entry shannon_cost( tt4 f )
{
  thread_local std::unordered_map<tt4, shannon_entry> memo;
  if ( auto it = memo.find( f ); it != memo.end() )
    return it->second;
  shannon_entry best{ 0, -1 };
  bool trivial = f == 0 || f == 0xFFFF;
  for ( auto m : tt_vars )
    trivial = trivial || f == m || f == static_cast<tt4>( ~m );
  if ( !trivial )
  {
    best.cost = 1 << 30;
    for ( int i = 0; i < 4; ++i )
    {
      const tt4 f0 = cofactor0( f, i ), f1 = cofactor1( f, i );
      if ( f0 == f1 )
        continue;
      int c;
      if ( f0 == 0 || f0 == 0xFFFF )
        c = 1 + shannon_cost( f1 ).cost;
      else if ( f1 == 0 || f1 == 0xFFFF )
        c = 1 + shannon_cost( f0 ).cost;
      else if ( f1 == static_cast<tt4>( ~f0 ) )
        c = 3 + shannon_cost( f0 ).cost;
      else
        c = 3 + shannon_cost( f0 ).cost + shannon_cost( f1 ).cost;
      if ( c < best.cost )
        best = { c, i };
    }
  }
  memo.emplace( f, best );
  return best;
}

inline recipe::operand shannon_emit( recipe_builder& b, tt4 f, std::vector<node_id> const& leaves,
                                     std::unordered_map<tt4, recipe::operand>& done )
{
  if ( auto it = done.find( f ); it != done.end() )
    return it->second;
  if ( auto it = done.find( static_cast<tt4>( ~f ) ); it != done.end() )
    return !it->second;

  recipe::operand result;
  if ( f == 0 || f == 0xFFFF )
    result = b.leaf( f == 0 ? const0 : const1 );
  else
  {
    std::optional<recipe::operand> lit;
    for ( std::size_t i = 0; i < leaves.size(); ++i )
      if ( f == tt_vars[i] || f == static_cast<tt4>( ~tt_vars[i] ) )
        lit = b.leaf( make_literal( leaves[i], f != tt_vars[i] ) );
    if ( lit )
      result = *lit;
    else
    {
      const int i = shannon_cost( f ).var;
      const auto x = b.leaf( make_literal( leaves[i] ) );
      const tt4 f0 = cofactor0( f, i ), f1 = cofactor1( f, i );
      if ( f0 == 0 )
        result = b.and_( x, shannon_emit( b, f1, leaves, done ) );
      else if ( f1 == 0 )
        result = b.and_( !x, shannon_emit( b, f0, leaves, done ) );
      else if ( f0 == 0xFFFF )
        result = !b.and_( x, !shannon_emit( b, f1, leaves, done ) );
      else if ( f1 == 0xFFFF )
        result = !b.and_( !x, !shannon_emit( b, f0, leaves, done ) );
      else if ( f1 == static_cast<tt4>( ~f0 ) )
      {
        const auto g = shannon_emit( b, f0, leaves, done );
        result = b.or_( b.and_( x, !g ), b.and_( !x, g ) );
      }
      else
      {
        const auto e1 = shannon_emit( b, f1, leaves, done );
        const auto e0 = shannon_emit( b, f0, leaves, done );
        result = b.or_( b.and_( x, e1 ), b.and_( !x, e0 ) );
      }
    }
  }
  done.emplace( f, result );
  return result;
}

inline recipe shannon_recipe( tt4 f, std::vector<node_id> const& leaves )
{
  recipe_builder b;
  std::unordered_map<tt4, recipe::operand> done;
  auto o = shannon_emit( b, f, leaves, done );
  return std::move( b ).finish( o );
}

/* ---------- refactor ---------- */

/* grows a fanout-free cone under `n` while it has at most four leaves */
inline std::vector<node_id> fanout_free_leaves( network_view const& v, node_id n, std::vector<node_id>& cone )
{
  cone = { n };
  std::vector<node_id> leaves;
  auto add_leaf = [&]( std::vector<node_id>& ls, node_id m ) {
    if ( !in_list( ls, m ) )
      ls.push_back( m );
  };
  add_leaf( leaves, node_of( v.gate( n ).fanin0 ) );
  add_leaf( leaves, node_of( v.gate( n ).fanin1 ) );

  while ( true )
  {
    std::sort( leaves.begin(), leaves.end(), std::greater<>() );
    bool grown = false;
    for ( auto l : leaves )
    {
      if ( !v.is_and( l ) )
        continue;
      std::uint32_t inside = 0;
      for ( auto c : cone )
        inside += ( node_of( v.gate( c ).fanin0 ) == l ) + ( node_of( v.gate( c ).fanin1 ) == l );
      if ( inside != v.refs[l] )
        continue;
      auto next = leaves;
      next.erase( std::find( next.begin(), next.end(), l ) );
      add_leaf( next, node_of( v.gate( l ).fanin0 ) );
      add_leaf( next, node_of( v.gate( l ).fanin1 ) );
      if ( next.size() > 4 )
        continue;
      leaves = std::move( next );
      cone.push_back( l );
      grown = true;
      break;
    }
    if ( !grown )
      break;
  }
  std::sort( leaves.begin(), leaves.end() );
  return leaves;
}

inline std::optional<recipe> refactor_find( network_view& v, node_id n, bool zero_cost )
{
  std::vector<node_id> cone;
  auto leaves = fanout_free_leaves( v, n, cone );
  if ( cone.size() < 2 )
    return std::nullopt;
  std::unordered_map<node_id, tt4> tts;
  const tt4 f = cone_tt( v, n, leaves, tts );
  std::vector<recipe> cands{ shannon_recipe( f, leaves ) };
  return pick_candidate( v, n, cands, zero_cost, &leaves );
}

/* ---------- resub ---------- */

/* reconvergence-driven cut of at most four leaves */
inline std::vector<node_id> resub_cut( network_view const& v, node_id n )
{
  std::vector<node_id> leaves;
  for ( auto f : { v.gate( n ).fanin0, v.gate( n ).fanin1 } )
    if ( !in_list( leaves, node_of( f ) ) )
      leaves.push_back( node_of( f ) );
  while ( true )
  {
    std::optional<node_id> best;
    std::size_t best_size = 5;
    for ( auto l : leaves )
    {
      if ( !v.is_and( l ) )
        continue;
      std::size_t size = leaves.size() - 1;
      for ( auto f : { v.gate( l ).fanin0, v.gate( l ).fanin1 } )
        size += !in_list( leaves, node_of( f ) );
      if ( size < best_size || ( size == best_size && best && l > *best ) )
      {
        best = l;
        best_size = size;
      }
    }
    if ( !best || best_size > 4 )
      break;
    const auto l = *best;
    leaves.erase( std::find( leaves.begin(), leaves.end(), l ) );
    for ( auto f : { v.gate( l ).fanin0, v.gate( l ).fanin1 } )
      if ( !in_list( leaves, node_of( f ) ) )
        leaves.push_back( node_of( f ) );
  }
  std::sort( leaves.begin(), leaves.end() );
  return leaves;
}

inline constexpr std::size_t resub_divisor_limit = 50;

inline std::optional<recipe> resub_find( network_view& v, node_id n, bool zero_cost )
{
  const auto leaves = resub_cut( v, n );
  std::unordered_map<node_id, tt4> tts;
  const tt4 target = cone_tt( v, n, leaves, tts );

  std::vector<node_id> mffc;
  const auto mffc_size = deref_node( v, n, &leaves, &mffc );
  ref_node( v, n, &leaves );

  std::vector<node_id> divs( leaves.begin(), leaves.end() );
  std::vector<tt4> div_tts;
  for ( auto d : divs )
    div_tts.push_back( cone_tt( v, d, leaves, tts ) );
  for ( std::size_t i = 0; i < divs.size() && divs.size() < resub_divisor_limit; ++i )
    for ( auto f : v.fanouts[divs[i]] )
    {
      if ( f == n || v.refs[f] == 0 || in_list( mffc, f ) || in_list( divs, f ) )
        continue;
      auto const& g = v.gate( f );
      if ( !in_list( divs, node_of( g.fanin0 ) ) || !in_list( divs, node_of( g.fanin1 ) ) )
        continue;
      tt4 a = div_tts[std::find( divs.begin(), divs.end(), node_of( g.fanin0 ) ) - divs.begin()];
      tt4 b = div_tts[std::find( divs.begin(), divs.end(), node_of( g.fanin1 ) ) - divs.begin()];
      if ( is_complemented( g.fanin0 ) )
        a = static_cast<tt4>( ~a );
      if ( is_complemented( g.fanin1 ) )
        b = static_cast<tt4>( ~b );
      divs.push_back( f );
      div_tts.push_back( static_cast<tt4>( a & b ) );
      if ( divs.size() >= resub_divisor_limit )
        break;
    }

  /* freed area counts only the window part of the MFFC, so the estimate is conservative */
  if ( target == 0 || target == 0xFFFF )
    return literal_recipe( target == 0 ? const0 : const1 );
  for ( std::size_t i = 0; i < divs.size(); ++i )
    if ( div_tts[i] == target || div_tts[i] == static_cast<tt4>( ~target ) )
      return literal_recipe( make_literal( divs[i], div_tts[i] != target ) );

  if ( mffc_size < 2 && !zero_cost )
    return std::nullopt;
  std::vector<recipe> cands;
  for ( std::size_t i = 0; i < divs.size() && cands.empty(); ++i )
    for ( std::size_t j = i + 1; j < divs.size() && cands.empty(); ++j )
      for ( int pol = 0; pol < 4 && cands.empty(); ++pol )
      {
        const bool ci = pol & 1, cj = pol & 2;
        const tt4 ti = ci ? static_cast<tt4>( ~div_tts[i] ) : div_tts[i];
        const tt4 tj = cj ? static_cast<tt4>( ~div_tts[j] ) : div_tts[j];
        const tt4 t = static_cast<tt4>( ti & tj );
        if ( t != target && t != static_cast<tt4>( ~target ) )
          continue;
        recipe_builder b;
        auto o = b.and_( b.leaf( make_literal( divs[i], ci ) ), b.leaf( make_literal( divs[j], cj ) ) );
        cands.push_back( std::move( b ).finish( t == target ? o : !o ) );
      }
  return pick_candidate( v, n, cands, zero_cost, &leaves );
}

} // namespace detail

/*! \brief Rebuilds maximal single-fanout AND trees as depth-minimal trees. */
inline aig_network balance( aig_network const& input )
{
  const auto ntk = strash( input );
  detail::network_view v( ntk );
  aig_builder b( ntk.num_inputs() );
  constexpr literal unset = ~literal{ 0 };
  std::vector<literal> map( ntk.num_nodes(), unset );
  std::vector<std::uint32_t> level( ntk.num_inputs() + 1, 0 ); /* indexed by new node */
  map[0] = const0;
  for ( node_id i = 1; i <= ntk.num_inputs(); ++i )
    map[i] = make_literal( i );

  auto level_of = [&]( literal l ) { return level[node_of( l )]; };

  auto build = [&]( auto&& self, node_id root ) -> literal {
    if ( map[root] != unset )
      return map[root];
    std::vector<literal> leaves;
    std::vector<literal> stack{ v.gate( root ).fanin0, v.gate( root ).fanin1 };
    while ( !stack.empty() )
    {
      const auto f = stack.back();
      stack.pop_back();
      const auto m = node_of( f );
      if ( !is_complemented( f ) && ntk.is_and( m ) && v.refs[m] == 1 )
      {
        stack.push_back( ntk.gate( m ).fanin1 );
        stack.push_back( ntk.gate( m ).fanin0 );
      }
      else
        leaves.push_back( f );
    }
    std::vector<literal> mapped;
    for ( auto f : leaves )
      mapped.push_back( negate_if( self( self, node_of( f ) ), is_complemented( f ) ) );
    std::sort( mapped.begin(), mapped.end() );
    mapped.erase( std::unique( mapped.begin(), mapped.end() ), mapped.end() );

    literal result;
    if ( std::adjacent_find( mapped.begin(), mapped.end(),
                             []( literal a, literal c ) { return c == negate( a ); } ) != mapped.end() ||
         ( !mapped.empty() && mapped.front() == const0 ) )
      result = const0;
    else
    {
      using item = std::pair<std::uint32_t, literal>;
      std::priority_queue<item, std::vector<item>, std::greater<>> heap;
      for ( auto l : mapped )
        heap.emplace( level_of( l ), l );
      while ( heap.size() > 1 )
      {
        const auto a = heap.top().second;
        heap.pop();
        const auto c = heap.top().second;
        heap.pop();
        const auto l = b.create_and( a, c );
        if ( node_of( l ) >= level.size() )
          level.push_back( 1 + std::max( level_of( a ), level_of( c ) ) );
        heap.emplace( level_of( l ), l );
      }
      result = heap.empty() ? const1 : heap.top().second;
    }
    return map[root] = result;
  };

  for ( auto o : ntk.outputs() )
  {
    const auto m = node_of( o );
    const auto l = ntk.is_and( m ) ? build( build, m ) : map[m];
    b.add_output( negate_if( l, is_complemented( o ) ) );
  }
  return strash( std::move( b ).build() );
}

inline aig_network rewrite( aig_network const& ntk, bool zero_cost = false )
{
  return detail::local_pass( ntk, zero_cost, []( detail::network_view& v, node_id n, bool z ) {
    return detail::pick_candidate( v, n, detail::rewrite_candidates( v, n ), z );
  } );
}

inline aig_network refactor( aig_network const& ntk, bool zero_cost = false )
{
  return detail::local_pass( ntk, zero_cost, detail::refactor_find );
}

inline aig_network resub( aig_network const& ntk, bool zero_cost = false )
{
  return detail::local_pass( ntk, zero_cost, detail::resub_find );
}

/*! \brief Applies one native pass by token; oracle-only tokens raise unsupported_pass. */
inline aig_network apply_pass( aig_network const& ntk, std::string_view token )
{
  if ( token == "balance" )
    return balance( ntk );
  if ( token == "rewrite" || token == "rewrite -z" )
    return rewrite( ntk, token.size() > 7 );
  if ( token == "refactor" || token == "refactor -z" )
    return refactor( ntk, token.size() > 8 );
  if ( token == "resub" || token == "resub -z" )
    return resub( ntk, token.size() > 5 );
  for ( auto const& t : oracle_pass_tokens() )
    if ( token == t )
      throw unsupported_pass( "pass '" + std::string( token ) + "' is only available through an external oracle" );
  throw std::invalid_argument( "unknown pass '" + std::string( token ) + "'" );
}

} // namespace boils
