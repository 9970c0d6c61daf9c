mod common;

use std::sync::Arc;
use std::time::Duration;

use axum::http::StatusCode;
use common::*;
use foodtracker_core::auth::SessionTable;
use foodtracker_core::corpus;
use foodtracker_core::{NutritionFacts, RawMenuRecord, TrafficLightLabel};
use foodtracker_server::{admin_router, consumer_router};
use serde_json::{json, Value};

fn record(category: &str, name: &str, fat: Option<f64>) -> RawMenuRecord {
    RawMenuRecord {
        restaurant_name: String::new(),
        food_category: category.into(),
        item_name: name.into(),
        facts: NutritionFacts {
            calories: Some(250.0),
            total_fat: fat,
            saturated_fat: fat.map(|f| f / 2.0),
            protein: Some(9.0),
            ..Default::default()
        },
    }
}

fn names(body: &Value) -> Vec<String> {
    body.as_array().unwrap().iter().map(|v| v["name"].as_str().unwrap().to_owned()).collect()
}

#[tokio::test]
async fn categories_and_restaurants() {
    let h = Harness::new();
    assert_eq!(h.get("/api/categories").await, (StatusCode::OK, json!([])));

    let store = &h.state.store;
    store.replace_restaurant_menu("Burger Barn", &[record("Burgers", "Classic", Some(12.0))]).unwrap();
    store
        .replace_restaurant_menu("Bagel Stop", &[record("Bagels", "Plain", Some(1.0)), record("burgers", "Bagel Burger", None)])
        .unwrap();
    assert_eq!(h.get("/api/categories").await.1, json!(["Bagels", "Burgers"]));

    let (status, body) = h.get("/api/restaurants?category=BURGERS").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!([{"name": "Bagel Stop"}, {"name": "Burger Barn"}]));
    assert_eq!(h.get("/api/restaurants?category=Pizza").await.1, json!([]));

    let (status, body) = h.get("/api/restaurants").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_request");
}

#[tokio::test]
async fn menu_shape_and_order() {
    let h = Harness::new();
    h.state
        .store
        .replace_restaurant_menu(
            "Burger King",
            &[record("Burgers", "Whopper", Some(40.0)), record("Salads", "Side Salad", Some(0.0)), record("Sides", "Mystery", None)],
        )
        .unwrap();

    let (status, body) = h.get(&format!("/api/restaurants/{}/menu", segment("Burger King"))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(names(&body), ["Side Salad", "Whopper", "Mystery"]);
    assert_eq!(
        body[0],
        json!({"name": "Side Salad", "category": "Salads", "label": "green",
               "calories": 250.0, "total_fat": 0.0, "saturated_fat": 0.0})
    );
    assert_eq!(body[2]["label"], "unclassified");
    assert_eq!(body[2]["total_fat"], Value::Null);
    assert!(body[0].get("protein").is_none());

    let (_, full) = h.get("/api/restaurants/burger%20king/menu?full=true").await;
    assert_eq!(full[0]["protein"], 9.0);
    assert_eq!(full[0]["sodium"], Value::Null);
    for key in ["dietary_fiber", "protein", "carbohydrates", "sodium"] {
        assert!(full[1].get(key).is_some(), "{key}");
    }

    assert_eq!(h.get("/api/restaurants/Burger%20King/menu?full=maybe").await.0, StatusCode::BAD_REQUEST);
    let (status, body) = h.get("/api/restaurants/Nowhere/menu").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "not_found");
}

#[tokio::test]
async fn red_only_menu() {
    let h = Harness::new();
    h.state
        .store
        .replace_restaurant_menu("Fry Hut", &[record("Sides", "Fries", Some(17.0)), record("Sides", "Rings", Some(22.0))])
        .unwrap();
    let (_, body) = h.get("/api/restaurants/Fry%20Hut/menu").await;
    assert!(body.as_array().unwrap().iter().all(|i| i["label"] == "red"));
}

#[tokio::test]
async fn nearby_validation_and_default_radius() {
    let h = Harness::with(|s| s.with_default_radius(1000.0));
    h.state
        .store
        .seed_locations(&foodtracker_core::store::parse_locations("Near | 32.2319,-110.9501\nMid | 32.2379,-110.9501").unwrap())
        .unwrap();

    // Mid is ~667 m north: outside 500 m, inside the configured default of 1 km.
    let (status, body) = h.get("/api/nearby?lat=32.2319&lon=-110.9501").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(names(&body), ["Near", "Mid"]);
    assert_eq!(body[0]["distance_m"], 0.0);
    assert_eq!(names(&h.get("/api/nearby?lat=32.2319&lon=-110.9501&radius=500").await.1), ["Near"]);

    for bad in [
        "/api/nearby?lat=91&lon=0",
        "/api/nearby?lat=0&lon=181",
        "/api/nearby?lat=abc&lon=0",
        "/api/nearby?lon=0",
        "/api/nearby?lat=0",
        "/api/nearby?lat=0&lon=0&radius=0",
        "/api/nearby?lat=0&lon=0&radius=-5",
        "/api/nearby?lat=0&lon=0&radius=NaN",
    ] {
        let (status, body) = h.get(bad).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{bad}");
        assert_eq!(body["code"], "invalid_request");
    }
}

#[tokio::test]
async fn tips_endpoint() {
    let h = Harness::new();
    let store = &h.state.store;
    store.upsert_tip("*", TrafficLightLabel::Red, "Share it.").unwrap();
    store.upsert_tip("Burgers", TrafficLightLabel::Red, "Skip the cheese.").unwrap();

    assert_eq!(h.get("/api/tips?category=Pizza&label=red").await.1, json!([{"text": "Share it."}]));
    assert_eq!(
        h.get("/api/tips?category=burgers&label=RED").await.1,
        json!([{"text": "Share it."}, {"text": "Skip the cheese."}])
    );
    assert_eq!(h.get("/api/tips?label=red").await.1, json!([{"text": "Share it."}]));
    assert_eq!(h.get("/api/tips?category=Burgers&label=green").await.1, json!([]));
    assert_eq!(h.get("/api/tips?category=Burgers&label=purple").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(h.get("/api/tips?category=Burgers").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn login_outcomes_are_indistinguishable() {
    let h = Harness::new();
    let token = h.login().await;
    assert_eq!(token.len(), 32);

    let wrong = h.post("/admin/login", &json!({"username": ADMIN_USER, "credential": "nope"})).await;
    let unknown = h.post("/admin/login", &json!({"username": "ghost", "credential": ADMIN_CREDENTIAL})).await;
    assert_eq!(wrong.0, StatusCode::UNAUTHORIZED);
    assert_eq!(wrong, unknown);
    assert_eq!(h.post("/admin/login", &json!({"user": "x"})).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn dispatch_requires_valid_token_first() {
    let h = Harness::new();
    for body in [
        json!({"token": "0000", "action": "ingest", "payload": {"root": "/"}}),
        json!({"token": "0000", "action": "does_not_exist"}),
        json!({"action": "list_failures"}),
    ] {
        let (status, response) = h.post("/admin/dispatch", &body).await;
        assert_eq!(status, StatusCode::UNAUTHORIZED);
        assert_eq!(response, json!({"code": "unauthorized", "message": "authentication required"}));
    }
    assert_eq!(post_raw(&h.app, "/admin/dispatch", "not json".into()).await.0, StatusCode::UNAUTHORIZED);

    let token = h.login().await;
    let (status, body) = h.dispatch(&token, json!({"action": "does_not_exist"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid_request");
    let (status, body) = h.dispatch(&token, json!({"action": "list_failures"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({"failures": []}));
}

#[tokio::test]
async fn expired_token_is_rejected() {
    let h = Harness::with(|s| s.with_sessions(SessionTable::new(Duration::from_millis(50))));
    let token = h.login().await;
    assert_eq!(h.dispatch(&token, json!({"action": "list_failures"})).await.0, StatusCode::OK);
    tokio::time::sleep(Duration::from_millis(120)).await;
    assert_eq!(h.dispatch(&token, json!({"action": "list_failures"})).await.0, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn seeding_through_the_facade() {
    let h = Harness::new();
    let token = h.login().await;
    let (status, body) = h
        .dispatch(&token, json!({"action": "seed_locations", "payload": {"text": "A | 1,1\nB | 1.01,1"}}))
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({"entries": 2}));
    assert_eq!(names(&h.get("/api/nearby?lat=1&lon=1").await.1), ["A"]);

    let (status, body) = h
        .dispatch(&token, json!({"action": "seed_tips", "payload": {"text": "* | red | one\n* | blue | two"}}))
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["message"].as_str().unwrap().starts_with("line 2"), "{body}");

    let (status, _) = h
        .dispatch(&token, json!({"action": "seed_tips", "payload": {"text": "* | red | one"}}))
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(h.get("/api/tips?label=red").await.1, json!([{"text": "one"}]));
}

#[tokio::test]
async fn ingest_through_the_facade() {
    let corpus = corpus::generate(10, 11);
    let fetcher = Arc::new(CountingFetcher::default());
    let h = Harness::with(|s| s.with_fetcher(fetcher.clone()));
    let root = h.dir.path().join("corpus");
    corpus.write_to(&root).unwrap();
    let token = h.login().await;

    let (status, report) = h
        .dispatch(&token, json!({"action": "ingest", "payload": {"root": root.to_str().unwrap()}}))
        .await;
    assert_eq!(status, StatusCode::OK, "{report}");
    assert_eq!(report["restaurants_found"], 10);
    assert_eq!(report["restaurants_parsed"], 10);
    assert_eq!(report["items_extracted"], corpus.manifest.total_records());
    assert_eq!(report["rows_skipped"], corpus.manifest.total_malformed_rows());
    assert_eq!(*fetcher.calls.lock().unwrap(), 11);

    let (status, body) = h
        .dispatch(&token, json!({"action": "ingest", "payload": {"root": "/no/such/corpus"}}))
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "root_unreachable");
}

#[tokio::test]
async fn failed_pages_are_listed() {
    let corpus = corpus::generate(10, 12);
    let h = Harness::new();
    let root = h.dir.path().join("corpus");
    corpus.write_to(&root).unwrap();
    std::fs::remove_file(root.join(&corpus.pages[3].file)).unwrap();
    let token = h.login().await;

    let (_, report) = h
        .dispatch(&token, json!({"action": "ingest", "payload": {"root": root.to_str().unwrap()}}))
        .await;
    assert_eq!(report["restaurants_parsed"], 9);
    let (_, failures) = h.dispatch(&token, json!({"action": "list_failures"})).await;
    let failures = failures["failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert!(failures[0]["locator"].as_str().unwrap().ends_with(&corpus.pages[3].file));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn concurrent_ingest_conflicts() {
    let corpus = corpus::generate(10, 13);
    let (fetcher, entered, release) = GatedFetcher::new();
    let h = Harness::with(|s| s.with_fetcher(fetcher));
    let root = h.dir.path().join("corpus");
    corpus.write_to(&root).unwrap();
    let token = h.login().await;
    let action = json!({"action": "ingest", "payload": {"root": root.to_str().unwrap()}});

    let first = {
        let app = h.app.clone();
        let mut body = action.clone();
        body["token"] = json!(token);
        tokio::spawn(async move { post_raw(&app, "/admin/dispatch", body.to_string()).await })
    };
    tokio::task::spawn_blocking(move || entered.recv().unwrap()).await.unwrap();

    let (status, body) = h.dispatch(&token, action.clone()).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "conflict");

    release.send(()).unwrap();
    let (status, report) = first.await.unwrap();
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["restaurants_parsed"], 10);

    // The slot is free again.
    assert_eq!(h.dispatch(&token, action).await.0, StatusCode::OK);
}

#[tokio::test]
async fn consumer_calls_leave_store_untouched() {
    let corpus = corpus::generate(10, 14);
    let h = Harness::new();
    let root = h.dir.path().join("corpus");
    corpus.write_to(&root).unwrap();
    let token = h.login().await;
    h.dispatch(&token, json!({"action": "ingest", "payload": {"root": root.to_str().unwrap()}})).await;
    h.dispatch(&token, json!({"action": "seed_locations", "payload": {"text": corpus.locations_text}})).await;

    let before = store_bytes(&h.db_path());
    let name = segment(&corpus.manifest.restaurants[0].name);
    for uri in [
        "/api/categories".to_owned(),
        "/api/restaurants?category=Burgers".to_owned(),
        format!("/api/restaurants/{name}/menu"),
        format!("/api/restaurants/{name}/menu?full=true"),
        "/api/nearby?lat=32.2319&lon=-110.9501&radius=2000".to_owned(),
        "/api/tips?label=red&category=Burgers".to_owned(),
        "/api/restaurants/missing/menu".to_owned(),
    ] {
        h.get(&uri).await;
    }
    assert_eq!(store_bytes(&h.db_path()), before);
}

#[tokio::test]
async fn route_families_are_isolated() {
    let h = Harness::new();
    let consumer = consumer_router(h.state.clone());
    let admin = admin_router(h.state.clone());

    let (status, _) = post_raw(
        &consumer,
        "/admin/login",
        json!({"username": ADMIN_USER, "credential": ADMIN_CREDENTIAL}).to_string(),
    )
    .await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let get = |uri: &str| axum::http::Request::get(uri).body(axum::body::Body::empty()).unwrap();
    assert_eq!(send(&admin, get("/api/categories")).await.0, StatusCode::NOT_FOUND);
    assert_eq!(send(&consumer, get("/api/categories")).await.0, StatusCode::OK);
}
