#include "imstb/ims/cx_client.hpp"

namespace imstb::ims {

void CxClient::request(hss::CxMessage msg, Callback cb) {
  msg.correlation_id = ++next_id_;
  const auto id = msg.correlation_id;
  try {
    runtime_.send(self_, hss_, std::move(msg));
  } catch (const net::UnknownDestination&) {
    cb(std::nullopt);
    return;
  }
  auto& p = pending_[id];
  p.cb = std::move(cb);
  p.timer = runtime_.schedule_after(timeout_, [this, id] {
    const auto it = pending_.find(id);
    if (it == pending_.end()) return;
    auto callback = std::move(it->second.cb);
    pending_.erase(it);
    callback(std::nullopt);
  });
}

bool CxClient::on_answer(const hss::CxMessage& answer) {
  const auto it = pending_.find(answer.correlation_id);
  if (it == pending_.end()) return false;
  runtime_.cancel(it->second.timer);
  auto callback = std::move(it->second.cb);
  pending_.erase(it);
  callback(answer);
  return true;
}

}  // namespace imstb::ims
