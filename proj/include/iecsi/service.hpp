#pragma once

// HTTP API under /v1. Capability tokens are passed as
// "Authorization: Bearer <token>" and bound to one role and scope:
//
//   researcher   one study: sessions, annotators, agreement, analysis
//   participant  one session: next step, responses, task, summaries
//   annotator    one study: ratings, agreement

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "iecsi/storage.hpp"

namespace httplib {
class Server;
}

namespace iecsi {

enum class Role { Participant, Annotator, Researcher };

std::string_view to_string(Role r);

struct SessionToken {
  Role role = Role::Participant;
  std::string study_id;
  // Participant tokens only.
  std::string session_id;
  // Annotator tokens only.
  std::string annotator_id;
};

class Service {
 public:
  // Studies live under data_root (see StudyStore); issued tokens are kept
  // in data_root/tokens.json so they survive a restart.
  explicit Service(std::filesystem::path data_root);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds without serving. Port 0 picks an ephemeral port. Returns false
  // when the address cannot be bound.
  bool bind(const std::string& host, int port);
  int port() const { return port_; }
  // Serves until stop(); returns false if the server failed.
  bool run();
  void stop();

  // Researcher token for a study already in the store, issued on first
  // use (for studies placed on disk rather than created over HTTP).
  std::string issue_researcher_token(const std::string& study_id);
  std::optional<SessionToken> resolve(const std::string& token) const;

  StudyStore& store() { return store_; }

 private:
  void routes();
  std::string issue(const SessionToken& token);
  void persist_tokens();
  std::mutex& study_lock(const std::string& study_id);

  StudyStore store_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = 0;
  mutable std::mutex tokens_mutex_;
  std::map<std::string, SessionToken> tokens_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace iecsi
