use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};

use foodtracker_core::corpus::Manifest;
use foodtracker_core::Store;
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_foodtracker");

fn foodtracker(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("FOODTRACKER_STORE").env_remove("FOODTRACKER_BIND").output().unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen_corpus(dir: &Path, restaurants: &str) -> Manifest {
    let output = foodtracker(&["gen-corpus", "--out", path(dir), "--restaurants", restaurants, "--seed", "5"]);
    assert!(output.status.success(), "{}", stderr(&output));
    Manifest::load(dir).unwrap()
}

/// Everything a consumer can read, in a comparable form.
fn snapshot(db: &Path) -> String {
    let store = Store::open(db).unwrap();
    let mut out = format!("{:?}\n", store.list_categories().unwrap());
    for restaurant in store.list_restaurants().unwrap() {
        let menu = store.menu_for_restaurant(restaurant.id).unwrap();
        out.push_str(&format!("{restaurant:?}\n{menu:?}\n"));
    }
    out
}

#[test]
fn ingest_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let manifest = gen_corpus(&corpus, "10");
    let db = dir.path().join("menus.db");

    let output = foodtracker(&["ingest", "--store", path(&db), "--root", path(&corpus)]);
    assert!(output.status.success(), "{}", stderr(&output));
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["restaurants_found"], 10);
    assert_eq!(report["restaurants_parsed"], 10);
    assert_eq!(report["items_extracted"], manifest.total_records());
    assert_eq!(report["failures"], json!([]));
}

#[test]
fn unreachable_root_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("menus.db");
    let output = foodtracker(&["ingest", "--store", path(&db), "--root", path(&dir.path().join("missing"))]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).starts_with("error: "), "{}", stderr(&output));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(foodtracker(&["ingest"]).status.code(), Some(2));
    assert_eq!(foodtracker(&["seed", "--store", "x.db"]).status.code(), Some(2));
    assert_eq!(foodtracker(&["serve", "--default-radius", "0"]).status.code(), Some(2));
    assert_eq!(foodtracker(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn seed_errors_cite_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("menus.db");
    let file = dir.path().join("locations.txt");
    let mut text = String::from("# comment\n");
    for i in 0..5 {
        text.push_str(&format!("Place {i} | 32.2,-110.9\n"));
    }
    text.push_str("Broken | 32.2\n");
    std::fs::write(&file, text).unwrap();

    let output = foodtracker(&["seed", "--store", path(&db), "--locations", path(&file)]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("line 7"), "{}", stderr(&output));
    // Nothing was written.
    assert!(Store::open(&db).unwrap().all_locations().unwrap().is_empty());

    let tips = dir.path().join("tips.txt");
    std::fs::write(&tips, "* | red | Share a side.\nBurgers | green | Add lettuce.\n").unwrap();
    std::fs::write(&file, "Place | 32.2,-110.9 ; 32.21,-110.9\n").unwrap();
    let output = foodtracker(&["seed", "--store", path(&db), "--locations", path(&file), "--tips", path(&tips)]);
    assert!(output.status.success(), "{}", stderr(&output));
    let store = Store::open(&db).unwrap();
    assert_eq!(store.all_locations().unwrap().len(), 2);
    assert_eq!(store.tips_for(Some("burgers"), "green".parse().unwrap()).unwrap().len(), 1);
}

struct Serving(Child);

impl Drop for Serving {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

/// Starts `serve` on an ephemeral port and returns its base address.
fn serve(db: &Path) -> (Serving, String) {
    let mut child = Command::new(BIN)
        .args(["serve", "--store", path(db), "--bind", "127.0.0.1:0"])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut lines = BufReader::new(child.stderr.take().unwrap()).lines();
    let addr = loop {
        let line = lines.next().expect("server exited before listening").unwrap();
        if let Some(addr) = line.strip_prefix("listening on ") {
            break addr.to_owned();
        }
    };
    // Keep draining so logging never blocks the server.
    std::thread::spawn(move || lines.for_each(drop));
    (Serving(child), format!("http://{addr}"))
}

fn post(base: &str, route: &str, body: Value) -> (u16, Value) {
    let agent = ureq::Agent::new_with_config(ureq::Agent::config_builder().http_status_as_error(false).build());
    let mut response = agent
        .post(format!("{base}{route}"))
        .header("content-type", "application/json")
        .send(body.to_string())
        .unwrap();
    let text = response.body_mut().read_to_string().unwrap();
    (response.status().as_u16(), serde_json::from_str(&text).unwrap())
}

fn admin_add(db: &Path, username: &str, credential: &str) {
    let mut child = Command::new(BIN)
        .args(["admin-add", "--store", path(db), "--username", username, "--credential-stdin"])
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    writeln!(child.stdin.take().unwrap(), "{credential}").unwrap();
    assert!(child.wait().unwrap().success());
}

#[test]
fn admin_add_then_login_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("menus.db");
    admin_add(&db, "ops", "s3cret words");

    let (_server, base) = serve(&db);
    let (status, body) = post(&base, "/admin/login", json!({"username": "ops", "credential": "s3cret words"}));
    assert_eq!(status, 200, "{body}");
    assert_eq!(body["token"].as_str().unwrap().len(), 32);
    let (status, _) = post(&base, "/admin/login", json!({"username": "ops", "credential": "guess"}));
    assert_eq!(status, 401);

    let mut response = ureq::get(format!("{base}/api/categories")).call().unwrap();
    assert_eq!(response.body_mut().read_to_string().unwrap(), "[]");
}

#[test]
fn empty_credential_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("menus.db");
    let output = Command::new(BIN)
        .args(["admin-add", "--store", path(&db), "--username", "ops", "--credential-stdin"])
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn port_in_use_is_a_startup_error() {
    let dir = tempfile::tempdir().unwrap();
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let output = foodtracker(&["serve", "--store", path(&dir.path().join("menus.db")), "--bind", &addr]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains(&format!("cannot listen on {addr}")), "{}", stderr(&output));
}

#[test]
fn cli_and_api_ingest_agree() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    gen_corpus(&corpus, "12");

    let via_cli = dir.path().join("cli.db");
    let output = foodtracker(&["ingest", "--store", path(&via_cli), "--root", path(&corpus)]);
    assert!(output.status.success(), "{}", stderr(&output));

    let via_api = dir.path().join("api.db");
    admin_add(&via_api, "ops", "pw");
    {
        let (_server, base) = serve(&via_api);
        let (_, login) = post(&base, "/admin/login", json!({"username": "ops", "credential": "pw"}));
        let (status, report) = post(
            &base,
            "/admin/dispatch",
            json!({"token": login["token"], "action": "ingest", "payload": {"root": path(&corpus)}}),
        );
        assert_eq!(status, 200, "{report}");
        assert_eq!(report, serde_json::from_slice::<Value>(&output.stdout).unwrap());
    }
    assert_eq!(snapshot(&via_cli), snapshot(&via_api));
}
