#include <doctest.h>

#include <condition_variable>
#include <random>
#include <thread>

#include "fixtures.hpp"
#include "marketpalace/common/error.hpp"
#include "marketpalace/crypto/envelope.hpp"
#include "marketpalace/crypto/hash.hpp"
#include "marketpalace/gossip/event_loop.hpp"
#include "marketpalace/gossip/node.hpp"
#include "marketpalace/gossip/push_timer.hpp"
#include "marketpalace/gossip/transport.hpp"
#include "marketpalace/gossip/wire.hpp"
#include "marketpalace/gossip/worker_pool.hpp"
#include "marketpalace/gossip/xor_metric.hpp"

namespace mp = marketpalace;
using namespace marketpalace::gossip;
using namespace std::chrono_literals;
using mptest::certified;
using mptest::server_keys;
using mptest::user_keys;

namespace {

mp::Errc error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const mp::Error& e) {
    return e.code();
  }
  FAIL_CHECK("expected an error");
  return mp::Errc::io;
}

template <class Pred>
bool eventually(Pred pred, std::chrono::milliseconds limit = 5s) {
  auto deadline = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(10ms);
  }
  return pred();
}

PeerInfo peer_info(int user, const std::string& addr = "127.0.0.1:1") {
  auto cert = certified(user_keys(user));
  return PeerInfo{cert.fingerprint(), addr, cert, 0};
}

// A node whose timer never fires during a test unless asked to.
struct TestNode {
  mp::SystemClock clock;
  mp::market::ListingStore store{server_keys().public_key};
  Node node;

  explicit TestNode(int user, NodeOptions options = quiet())
      : node(mptest::identity(user), server_keys().public_key, store, clock, options) {
    node.start();
  }

  static NodeOptions quiet() {
    NodeOptions o;
    o.period_s = 3600;
    o.phase_s = 3599;
    o.bootstrap_attempts = 2;
    o.bootstrap_retry_delay = 50ms;
    o.connect_timeout = 1000ms;
    o.io_timeout = 2000ms;
    return o;
  }
};

mp::market::ListingDraft draft(const std::string& title) { return {title, "", 100, "EUR", 3600}; }

}  // namespace

TEST_CASE("Wire.RoundtripEveryType") {
  for (int t = 1; t <= 7; ++t) {
    auto msg = WireMessage::make(static_cast<MessageType>(t), mp::Json{{"n", t}});
    auto bytes = frame_encode(msg);
    CHECK_EQ(bytes.size(), 4 + 1 + msg.payload.size());
    std::uint32_t len = (std::uint32_t{bytes[0]} << 24) | (bytes[1] << 16) | (bytes[2] << 8) | bytes[3];
    CHECK_EQ(len, 1 + msg.payload.size());
    CHECK_EQ(bytes[4], t);
    CHECK_EQ(frame_decode(bytes), msg);
  }
}

TEST_CASE("Wire.OversizeRejectedFromHeader") {
  mp::Bytes header{0x01, 0x00, 0x00, 0x01, 3};
  CHECK_EQ(error_code([&] { frame_decode(header); }), mp::Errc::oversize);
  FrameDecoder d;
  d.feed(header);
  CHECK_EQ(error_code([&] { d.next(); }), mp::Errc::oversize);
  WireMessage big{MessageType::push, std::string(kMaxFrameLength, 'x')};
  CHECK_EQ(error_code([&] { frame_encode(big); }), mp::Errc::oversize);
}

TEST_CASE("Wire.TruncatedAndMalformed") {
  auto bytes = frame_encode(WireMessage::make(MessageType::hello, mp::Json{{"a", 1}}));
  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    CHECK_MESSAGE(error_code([&] { frame_decode(mp::ByteView(bytes).first(cut)); }) == mp::Errc::incomplete_frame, cut);
  }
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_EQ(error_code([&] { frame_decode(trailing); }), mp::Errc::parse);
  auto bad_type = bytes;
  bad_type[4] = 9;
  CHECK_EQ(error_code([&] { frame_decode(bad_type); }), mp::Errc::parse);
  mp::Bytes empty{0, 0, 0, 0};
  CHECK_EQ(error_code([&] { frame_decode(empty); }), mp::Errc::parse);
}

TEST_CASE("Wire.StreamDecoderHandlesSplits") {
  std::vector<WireMessage> msgs;
  mp::Bytes stream;
  for (int i = 0; i < 20; ++i) {
    msgs.push_back(WireMessage::make(static_cast<MessageType>(1 + i % 7), mp::Json{{"i", i}}));
    auto f = frame_encode(msgs.back());
    stream.insert(stream.end(), f.begin(), f.end());
  }
  std::mt19937 rng(3);
  FrameDecoder d;
  std::vector<WireMessage> got;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    std::size_t n = std::min<std::size_t>(1 + rng() % 9, stream.size() - pos);
    d.feed(mp::ByteView(stream).subspan(pos, n));
    pos += n;
    while (auto m = d.next()) got.push_back(*m);
  }
  CHECK_EQ(got, msgs);
  CHECK_EQ(d.buffered(), 0u);
}

TEST_CASE("Wire.RandomBytesNeverCrashTheDecoder") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    mp::Bytes junk(rng() % 40);
    for (auto& b : junk) b = static_cast<std::uint8_t>(rng());
    if (!junk.empty() && rng() % 2) junk[0] = 0;
    try {
      frame_decode(junk);
    } catch (const mp::Error&) {
    }
    FrameDecoder d;
    try {
      d.feed(junk);
      while (d.next()) {
      }
    } catch (const mp::Error&) {
    }
  }
}

TEST_CASE("Xor.MetricProperties") {
  using Id8 = IdBytes<1>;
  for (int a = 0; a < 256; ++a) {
    Id8 x{static_cast<std::uint8_t>(a)};
    CHECK_EQ(xor_distance(x, x)[0], 0);
    for (int b = 0; b < 256; ++b) {
      Id8 y{static_cast<std::uint8_t>(b)};
      CHECK_EQ(xor_distance(x, y), xor_distance(y, x));
      for (int c = 0; c < 256; c += 17) {
        Id8 z{static_cast<std::uint8_t>(c)};
        CHECK_LE(xor_distance(x, z)[0], xor_distance(x, y)[0] + xor_distance(y, z)[0]);
      }
    }
  }
}

TEST_CASE("Xor.TriangleInequalityAt256Bits") {
  std::mt19937_64 rng(8);
  auto random_id = [&] {
    PeerId id;
    for (auto& b : id) b = static_cast<std::uint8_t>(rng());
    return id;
  };
  // d(a,c) = d(a,b) ^ d(b,c) <= d(a,b) + d(b,c); compare as big integers.
  auto add = [](const PeerId& x, const PeerId& y) {
    std::array<std::uint8_t, 33> sum{};
    unsigned carry = 0;
    for (int i = 31; i >= 0; --i) {
      unsigned s = x[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(i)] + carry;
      sum[static_cast<std::size_t>(i) + 1] = static_cast<std::uint8_t>(s);
      carry = s >> 8;
    }
    sum[0] = static_cast<std::uint8_t>(carry);
    return sum;
  };
  for (int i = 0; i < 1000; ++i) {
    auto a = random_id(), b = random_id(), c = random_id();
    auto ac = xor_distance(a, c);
    std::array<std::uint8_t, 33> wide{};
    std::copy(ac.begin(), ac.end(), wide.begin() + 1);
    CHECK_LE(wide, add(xor_distance(a, b), xor_distance(b, c)));
  }
}

TEST_CASE("KClosest.MatchesBruteForce") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<IdBytes<2>> ids(1 + rng() % 100);
    for (auto& id : ids) id = {static_cast<std::uint8_t>(rng() % 4), static_cast<std::uint8_t>(rng())};
    IdBytes<2> target{static_cast<std::uint8_t>(rng() % 4), static_cast<std::uint8_t>(rng())};
    for (std::size_t k : {1u, 5u, 20u}) {
      auto got = k_closest(ids, target, k, [](const IdBytes<2>& x) { return x; });
      auto oracle = ids;
      std::sort(oracle.begin(), oracle.end(), [&](const auto& a, const auto& b) {
        auto da = xor_distance(a, target), db = xor_distance(b, target);
        return da != db ? da < db : a < b;
      });
      oracle.resize(std::min(k, oracle.size()));
      CHECK_EQ(got, oracle);
    }
  }
}

TEST_CASE("PeerTable.IdsAndCertificates") {
  auto cert = certified(user_keys(0));
  CHECK_EQ(peer_id_from_cert(cert), peer_id_from_cert(cert));
  CHECK_EQ(peer_id_from_cert(cert), mp::crypto::sha256(user_keys(0).public_key.der()));
  CHECK_NE(peer_id_from_cert(cert), peer_id_from_cert(certified(user_keys(1))));
  mp::crypto::CertifiedKey junk{mp::to_bytes("x"), {}};
  CHECK_EQ(error_code([&] { peer_id_from_cert(junk); }), mp::Errc::encoding);
}

TEST_CASE("PeerTable.OnlyCertifiedEntriesNoDuplicates") {
  PeerTable table(server_keys().public_key, 3);
  CHECK(table.upsert(peer_info(0)));
  CHECK(table.upsert(peer_info(0, "127.0.0.1:2")));
  CHECK_EQ(table.size(), 1u);
  CHECK_EQ(table.get(peer_info(0).peer_id)->address, "127.0.0.1:2");

  auto self = mptest::self_signed(user_keys(1));
  CHECK_FALSE(table.upsert(PeerInfo{self.fingerprint(), "a:1", self, 0}));
  auto wrong_id = peer_info(1);
  wrong_id.peer_id = peer_info(2).peer_id;
  CHECK_FALSE(table.upsert(wrong_id));
  CHECK_EQ(table.size(), 1u);

  CHECK(table.upsert(peer_info(1)));
  CHECK(table.upsert(peer_info(2)));
  CHECK_FALSE(table.upsert(peer_info(3)));
  CHECK_EQ(table.size(), 3u);
}

TEST_CASE("PeerTable.KClosestSmallTable") {
  PeerTable table(server_keys().public_key);
  for (int i = 0; i < 4; ++i) table.upsert(peer_info(i));
  auto target = mp::crypto::sha256(mp::as_bytes("t"));
  CHECK_EQ(table.k_closest(target, 20).size(), 4u);
  auto one = table.k_closest(target, 1);
  REQUIRE_EQ(one.size(), 1u);
  for (const auto& p : table.all()) {
    CHECK_LE(xor_distance(one[0].peer_id, target), xor_distance(p.peer_id, target));
  }
}

TEST_CASE("PushTimer.FireTimes") {
  PushTimer t{90, 12.5};
  CHECK_EQ(t.fire_time(0), 12.5);
  CHECK_EQ(t.fire_time(1), 102.5);
  CHECK_EQ(t.fire_time(2), 192.5);
  CHECK_EQ(t.next_fire_at_or_after(0), 12.5);
  CHECK_EQ(t.next_fire_at_or_after(12.5), 12.5);
  CHECK_EQ(t.next_fire_at_or_after(12.6), 102.5);
}

TEST_CASE("EventLoop.RunsTasksInOrderAndTimers") {
  EventLoop loop;
  std::vector<int> order;
  std::mutex m;
  auto now = EventLoop::Clock::now();
  loop.post_at(now + 60ms, [&] { std::lock_guard l(m); order.push_back(3); });
  loop.post_at(now + 30ms, [&] { std::lock_guard l(m); order.push_back(2); });
  loop.post([&] { std::lock_guard l(m); order.push_back(1); });
  CHECK_EQ(loop.call([] { return 7; }), 7);
  CHECK(eventually([&] { std::lock_guard l(m); return order.size() == 3; }));
  CHECK_EQ(order, (std::vector<int>{1, 2, 3}));
  CHECK(loop.call([&] { return loop.in_loop(); }));
  CHECK_EQ(loop.call([&] { return loop.call([] { return 5; }); }), 5);
  loop.stop();
  CHECK_EQ(error_code([&] { loop.call([] { return 1; }); }), mp::Errc::io);
}

TEST_CASE("WorkerPool.RunsSubmittedWork") {
  WorkerPool pool(4);
  std::atomic<int> n{0};
  for (int i = 0; i < 100; ++i) pool.submit([&] { ++n; });
  CHECK(eventually([&] { return n == 100; }));
  pool.stop();
}

TEST_CASE("Transport.ConnectFailsFastOnClosedPort") {
  int port = mptest::free_port();
  auto t0 = std::chrono::steady_clock::now();
  CHECK_EQ(error_code([&] { connect_tcp("127.0.0.1", port, 5000ms); }), mp::Errc::unreachable);
  CHECK_LT(std::chrono::steady_clock::now() - t0, 5s);
}

TEST_CASE("Transport.FramesOverSocket") {
  Listener l("127.0.0.1", 0);
  std::thread server([&] {
    Socket s = l.accept();
    while (auto m = s.read_frame(2000ms)) s.write_frame(*m, 2000ms);
  });
  Socket c = connect_tcp("127.0.0.1", l.port(), 1000ms);
  auto msg = WireMessage::make(MessageType::push, mp::Json{{"x", std::string(100000, 'y')}});
  c.write_frame(msg, 1000ms);
  CHECK_EQ(c.read_frame(2000ms), msg);
  c.close();
  server.join();
  l.close();
}

TEST_CASE("Node.RejectsBadSetup") {
  mp::SystemClock clock;
  mp::market::ListingStore store(server_keys().public_key);
  NodeOptions o;
  o.period_s = 0;
  CHECK_EQ(error_code([&] { Node(mptest::identity(0), server_keys().public_key, store, clock, o); }), mp::Errc::rejected_parameters);
  o = NodeOptions{};
  o.phase_s = 90;
  CHECK_EQ(error_code([&] { Node(mptest::identity(0), server_keys().public_key, store, clock, o); }), mp::Errc::rejected_parameters);
  Identity self{user_keys(0).private_key, mptest::self_signed(user_keys(0))};
  CHECK_EQ(error_code([&] { Node(self, server_keys().public_key, store, clock, {}); }), mp::Errc::bad_cert);
  Identity mismatched{user_keys(1).private_key, certified(user_keys(0))};
  CHECK_EQ(error_code([&] { Node(mismatched, server_keys().public_key, store, clock, {}); }), mp::Errc::rejected_parameters);
}

TEST_CASE("Node.RandomPhaseWithinPeriod") {
  mp::SystemClock clock;
  mp::market::ListingStore store(server_keys().public_key);
  for (int i = 0; i < 20; ++i) {
    NodeOptions o;
    o.period_s = 3;
    Node n(mptest::identity(0), server_keys().public_key, store, clock, o);
    CHECK_GE(n.phase_s(), 0);
    CHECK_LT(n.phase_s(), 3);
  }
}

TEST_CASE("Node.TimerFireBuildsOnePushPerClosestPeer") {
  TestNode a(0);
  a.node.add_listing(draft("one"));
  a.node.add_listing(draft("two"));
  for (int i = 1; i <= 3; ++i) REQUIRE(a.node.add_peer(peer_info(i)));
  auto pushes = a.node.on_timer_fire();
  REQUIRE_EQ(pushes.size(), 3u);
  for (const auto& p : pushes) {
    CHECK_EQ(p.message.type, MessageType::push);
    auto snap = parse_push_payload(p.message.json());
    CHECK_EQ(snap.listings.size(), 2u);
  }
}

TEST_CASE("Node.EmptyStoreStillPushes") {
  TestNode a(0);
  a.node.add_peer(peer_info(1));
  auto pushes = a.node.on_timer_fire();
  REQUIRE_EQ(pushes.size(), 1u);
  CHECK(parse_push_payload(pushes[0].message.json()).listings.empty());
}

TEST_CASE("Node.HandlePushMergesAndRecordsSender") {
  TestNode a(0);
  TestNode b(1);
  auto sl = b.node.add_listing(draft("lamp"));
  Hello from_b{certified(user_keys(1)), b.node.address()};
  auto payload = push_payload(b.store.snapshot(b.clock));
  auto r = a.node.handle_push(from_b, payload);
  CHECK_EQ(r.accepted, 1u);
  CHECK(a.store.contains(sl.content_id));
  CHECK(a.node.peer(b.node.id()));
  auto again = a.node.handle_push(from_b, payload);
  CHECK_EQ(again.duplicates, 1u);
  CHECK_EQ(a.store.size(), 1u);
}

TEST_CASE("Node.HandlePushFromSelfSignedSenderIsRejected") {
  TestNode a(0);
  Hello forged{mptest::self_signed(user_keys(1)), "127.0.0.1:1"};
  CHECK_EQ(error_code([&] { a.node.handle_push(forged, push_payload({})); }), mp::Errc::bad_cert);
  CHECK(a.node.peers().empty());
  Hello ok{certified(user_keys(1)), "127.0.0.1:1"};
  CHECK_EQ(error_code([&] { a.node.handle_push(ok, mp::Json{{"listings", 1}}); }), mp::Errc::parse);
}

TEST_CASE("Node.AdversarialPushesNeverInstallUncertifiedData") {
  TestNode a(0);
  mp::ManualClock clock;
  auto owner = certified(user_keys(1));
  auto good = mp::market::create_signed_listing(user_keys(1).private_key, owner, draft("real"), a.clock);
  std::mt19937_64 rng(17);
  Hello sender{owner, "127.0.0.1:1"};
  for (int i = 0; i < 300; ++i) {
    auto j = push_payload(mp::market::StoreSnapshot{{good}, {}});
    auto& l = j["listings"][0];
    switch (rng() % 5) {
      case 0: l["listing"]["price_amount"] = static_cast<std::int64_t>(rng() % 1000); break;
      case 1: l["owner_cert"] = mptest::self_signed(user_keys(1)).to_json(); break;
      case 2: l["owner_cert"] = certified(user_keys(2)).to_json(); break;
      case 3: {
        auto sig = mp::base64_decode(l["signature"].get<std::string>());
        sig[rng() % sig.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        l["signature"] = mp::base64_encode(sig);
        break;
      }
      default: l["content_id"] = mp::hex_encode(mp::crypto::sha256(mp::as_bytes(std::to_string(rng())))); break;
    }
    try {
      a.node.handle_push(sender, j);
    } catch (const mp::Error&) {
    }
  }
  CHECK_EQ(a.store.size(), 0u);
  for (const auto& p : a.node.peers()) {
    CHECK(mp::crypto::verify_certification(server_keys().public_key, p.cert));
  }
}

TEST_CASE("Node.PushOverTcp") {
  TestNode a(0);
  TestNode b(1);
  REQUIRE_EQ(b.node.bootstrap({a.node.address()}), 1u);
  CHECK(eventually([&] { return a.node.peer(b.node.id()).has_value(); }));
  auto sl = a.node.add_listing(draft("chair"));
  std::atomic<bool> seen{false};
  b.node.set_listing_observer([&](const mp::market::SignedListing& got, Node::SteadyTime) {
    if (got.content_id == sl.content_id) seen = true;
  });
  a.node.fire_now();
  CHECK(b.store.contains(sl.content_id));
  CHECK(eventually([&] { return seen.load(); }));

  auto t = a.node.remove_listing(sl.content_id);
  a.node.fire_now();
  CHECK_FALSE(b.store.contains(sl.content_id));
  CHECK(b.store.is_tombstoned(t.content_id));
}

TEST_CASE("Node.UncertifiedHelloIsDisconnected") {
  TestNode a(0);
  auto [host, port] = std::pair{std::string("127.0.0.1"), std::stoi(a.node.address().substr(10))};
  Socket s = connect_tcp(host, port, 1000ms);
  s.write_frame(WireMessage::make(MessageType::hello, Hello{mptest::self_signed(user_keys(1)), "x:1"}.to_json()),
                1000ms);
  CHECK_FALSE(s.read_frame(2000ms).has_value());

  Socket t = connect_tcp(host, port, 1000ms);
  t.write_frame(WireMessage::make(MessageType::push, push_payload({})), 1000ms);
  CHECK_FALSE(t.read_frame(2000ms).has_value());
  CHECK(a.node.peers().empty());
}

TEST_CASE("Node.HelloAckCarriesIdentity") {
  TestNode a(0);
  auto port = std::stoi(a.node.address().substr(10));
  Socket s = connect_tcp("127.0.0.1", port, 1000ms);
  s.write_frame(WireMessage::make(MessageType::hello, Hello{certified(user_keys(1)), "127.0.0.1:9"}.to_json()),
                1000ms);
  auto ack = s.read_frame(2000ms);
  REQUIRE(ack);
  CHECK_EQ(ack->type, MessageType::hello_ack);
  CHECK_EQ(Hello::from_json(ack->json()).cert.public_key_der, user_keys(0).public_key.der());
  s.write_frame(WireMessage::make(MessageType::peers_request, mp::Json::object()), 1000ms);
  auto peers = s.read_frame(2000ms);
  REQUIRE(peers);
  CHECK_EQ(peers->type, MessageType::peers_response);
  CHECK(peers->json()["peers"].empty());
}

TEST_CASE("Node.BootstrapLearnsPeers") {
  TestNode boot(0);
  TestNode p1(1), p2(2), p3(3);
  for (auto* p : {&p1, &p2, &p3}) p->node.bootstrap({boot.node.address()});
  TestNode late(4);
  CHECK_GE(late.node.bootstrap({boot.node.address()}), 4u);
  for (auto* p : {&p1, &p2, &p3}) CHECK(late.node.peer(p->node.id()));
  CHECK(eventually([&] { return p1.node.peer(late.node.id()).has_value(); }));
}

TEST_CASE("Node.BootstrapFailsAfterRetries") {
  TestNode a(0);
  auto t0 = std::chrono::steady_clock::now();
  CHECK_EQ(error_code([&] { a.node.bootstrap({"127.0.0.1:" + std::to_string(mptest::free_port())}); }), mp::Errc::bootstrap_failed);
  CHECK_GE(std::chrono::steady_clock::now() - t0, 50ms);
  CHECK_EQ(error_code([&] { a.node.bootstrap({}); }), mp::Errc::rejected_parameters);
}

TEST_CASE("Node.PropagationSurvivesBootstrapLoss") {
  auto boot = std::make_unique<TestNode>(0);
  TestNode a(1), b(2);
  a.node.bootstrap({boot->node.address()});
  b.node.bootstrap({boot->node.address()});
  REQUIRE(b.node.peer(a.node.id()));
  boot.reset();
  auto sl = a.node.add_listing(draft("after"));
  a.node.fire_now();
  CHECK(b.store.contains(sl.content_id));
}

TEST_CASE("Node.EnvelopeDelivery") {
  TestNode a(0), b(1);
  b.node.bootstrap({a.node.address()});
  std::mutex m;
  std::vector<mp::crypto::Envelope> got;
  a.node.set_envelope_handler([&](const mp::crypto::Envelope& e) {
    std::lock_guard l(m);
    got.push_back(e);
  });
  auto env = mp::crypto::seal_envelope(user_keys(1).private_key, certified(user_keys(1)), user_keys(0).public_key,
                                       mp::as_bytes("hello a"), 1);
  b.node.send_envelope(a.node.id(), env);
  REQUIRE(eventually([&] { std::lock_guard l(m); return got.size() == 1; }));
  auto opened = mp::crypto::open_envelope(user_keys(0).private_key, server_keys().public_key, got[0]);
  CHECK_EQ(mp::to_string(opened.plaintext), "hello a");

  CHECK_EQ(error_code([&] { b.node.send_envelope(mp::crypto::sha256({}), env); }), mp::Errc::not_found);
}

TEST_CASE("Node.EnvelopeToCrashedPeerIsUnreachable") {
  auto a = std::make_unique<TestNode>(0);
  TestNode b(1);
  b.node.bootstrap({a->node.address()});
  auto id = a->node.id();
  a.reset();
  auto env = mp::crypto::seal_envelope(user_keys(1).private_key, certified(user_keys(1)), user_keys(0).public_key,
                                       mp::as_bytes("x"), 1);
  auto t0 = std::chrono::steady_clock::now();
  CHECK_EQ(error_code([&] { b.node.send_envelope(id, env); }), mp::Errc::unreachable);
  CHECK_LT(std::chrono::steady_clock::now() - t0, 5s);
}

TEST_CASE("Node.TimerDrivenPropagation") {
  NodeOptions fast = TestNode::quiet();
  fast.period_s = 0.3;
  fast.phase_s = 0.1;
  TestNode a(0, fast);
  TestNode b(1, TestNode::quiet());
  b.node.bootstrap({a.node.address()});
  REQUIRE(eventually([&] { return a.node.peer(b.node.id()).has_value(); }));
  auto sl = a.node.add_listing(draft("timed"));
  CHECK(eventually([&] { return b.store.contains(sl.content_id); }, 2s));
}
