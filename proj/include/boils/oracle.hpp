/*!
  \file oracle.hpp
  \brief Line protocol to an external synthesis evaluator (POSIX only).

  The child is launched through `/bin/sh -c`, receives
  `EVAL <circuit> <tok;tok;...>` on stdin and must answer with
  `OK <area> <delay>` or `ERR <message>` on stdout.
*/

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <cerrno>
#include <csignal>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace boils
{

class oracle_error : public std::runtime_error
{
public:
  oracle_error( std::string const& what, std::string output = {} )
      : std::runtime_error( what ), output_( std::move( output ) )
  {
  }
  std::string const& output() const noexcept { return output_; }

private:
  std::string output_;
};

struct oracle_endpoint
{
  std::string command;
  double timeout_seconds = 60.0;

  void validate() const
  {
    if ( command.empty() )
      throw std::invalid_argument( "oracle_endpoint: empty command" );
    if ( !( timeout_seconds > 0.0 ) )
      throw std::invalid_argument( "oracle_endpoint: timeout must be positive" );
  }
};

struct oracle_reply
{
  std::size_t area = 0;
  std::size_t delay = 0;
};

namespace detail
{

inline std::mutex& endpoint_mutex( std::string const& command )
{
  static std::mutex registry_lock;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard guard( registry_lock );
  auto& m = registry[command];
  if ( !m )
    m = std::make_unique<std::mutex>();
  return *m;
}

inline bool parse_count( std::string const& tok, std::size_t& out )
{
  if ( tok.empty() || tok.size() > 18 )
    return false;
  out = 0;
  for ( char c : tok )
  {
    if ( c < '0' || c > '9' )
      return false;
    out = out * 10 + static_cast<std::size_t>( c - '0' );
  }
  return true;
}

inline oracle_reply parse_oracle_reply( std::string const& line, std::string const& captured )
{
  if ( line.rfind( "ERR", 0 ) == 0 )
  {
    auto msg = line.size() > 4 ? line.substr( 4 ) : std::string{};
    throw oracle_error( "oracle error: " + msg, captured );
  }
  std::vector<std::string> parts;
  std::string cur;
  for ( char c : line )
  {
    if ( c == ' ' )
    {
      parts.push_back( cur );
      cur.clear();
    }
    else
      cur += c;
  }
  parts.push_back( cur );
  oracle_reply r;
  if ( parts.size() != 3 || parts[0] != "OK" || !parse_count( parts[1], r.area ) || !parse_count( parts[2], r.delay ) )
    throw oracle_error( "oracle: malformed reply '" + line + "'", captured );
  return r;
}

} // namespace detail

inline std::string join_tokens( std::span<const std::string> tokens )
{
  std::string s;
  for ( std::size_t i = 0; i < tokens.size(); ++i )
  {
    if ( i )
      s += ';';
    s += tokens[i];
  }
  return s;
}

/*! \brief Runs one evaluation request in a fresh child process. */
inline oracle_reply oracle_evaluate( oracle_endpoint const& ep, std::string const& circuit_path,
                                     std::span<const std::string> tokens )
{
  ep.validate();
  std::lock_guard guard( detail::endpoint_mutex( ep.command ) );

  int to_child[2], from_child[2];
  if ( ::pipe( to_child ) != 0 )
    throw oracle_error( "oracle: pipe failed" );
  if ( ::pipe( from_child ) != 0 )
  {
    ::close( to_child[0] );
    ::close( to_child[1] );
    throw oracle_error( "oracle: pipe failed" );
  }

  const pid_t pid = ::fork();
  if ( pid < 0 )
  {
    for ( int fd : { to_child[0], to_child[1], from_child[0], from_child[1] } )
      ::close( fd );
    throw oracle_error( "oracle: fork failed" );
  }
  if ( pid == 0 )
  {
    ::dup2( to_child[0], STDIN_FILENO );
    ::dup2( from_child[1], STDOUT_FILENO );
    for ( int fd : { to_child[0], to_child[1], from_child[0], from_child[1] } )
      ::close( fd );
    ::execl( "/bin/sh", "sh", "-c", ep.command.c_str(), static_cast<char*>( nullptr ) );
    ::_exit( 127 );
  }
  ::close( to_child[0] );
  ::close( from_child[1] );

  /* a child that exits without reading must not kill us with SIGPIPE */
  struct sigaction ignore{}, previous{};
  ignore.sa_handler = SIG_IGN;
  ::sigaction( SIGPIPE, &ignore, &previous );
  const std::string request = "EVAL " + circuit_path + " " + join_tokens( tokens ) + "\n";
  std::size_t written = 0;
  while ( written < request.size() )
  {
    auto w = ::write( to_child[1], request.data() + written, request.size() - written );
    if ( w < 0 && errno == EINTR )
      continue;
    if ( w <= 0 )
      break;
    written += static_cast<std::size_t>( w );
  }
  ::close( to_child[1] );
  ::sigaction( SIGPIPE, &previous, nullptr );

  std::string captured;
  bool timed_out = false;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>( ep.timeout_seconds );
  while ( captured.find( '\n' ) == std::string::npos )
  {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>( deadline - std::chrono::steady_clock::now() );
    if ( left.count() <= 0 )
    {
      timed_out = true;
      break;
    }
    pollfd pfd{ from_child[0], POLLIN, 0 };
    const int rc = ::poll( &pfd, 1, static_cast<int>( std::min<long long>( left.count(), 1000 ) ) );
    if ( rc < 0 && errno == EINTR )
      continue;
    if ( rc <= 0 )
      continue;
    char buf[4096];
    const auto n = ::read( from_child[0], buf, sizeof buf );
    if ( n < 0 && errno == EINTR )
      continue;
    if ( n <= 0 )
      break;
    captured.append( buf, static_cast<std::size_t>( n ) );
  }
  ::close( from_child[0] );

  int status = 0;
  if ( timed_out )
  {
    ::kill( pid, SIGKILL );
    ::waitpid( pid, &status, 0 );
    throw oracle_error( "oracle: timed out after " + std::to_string( ep.timeout_seconds ) + " s", captured );
  }
  ::waitpid( pid, &status, 0 );

  const auto nl = captured.find( '\n' );
  if ( nl == std::string::npos )
  {
    if ( !WIFEXITED( status ) || WEXITSTATUS( status ) != 0 )
      throw oracle_error( "oracle: child exited abnormally (status " + std::to_string( status ) + ")", captured );
    throw oracle_error( "oracle: no reply line", captured );
  }
  std::string line = captured.substr( 0, nl );
  if ( !line.empty() && line.back() == '\r' )
    line.pop_back();
  auto reply = detail::parse_oracle_reply( line, captured );
  if ( !WIFEXITED( status ) || WEXITSTATUS( status ) != 0 )
    throw oracle_error( "oracle: child exited with nonzero status", captured );
  return reply;
}

} // namespace boils
