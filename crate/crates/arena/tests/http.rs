use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rendezvous::forge::{clique_spider, random_connected_graph};
use rendezvous::game::{div_moves, fac_moves, facilitator_wins, DivPlacement, FacPlacement};
use rendezvous::{Graph, Instance};
use rendezvous_arena::{router, Action, Arena, Config, Role, Status};
use serde_json::{json, Value};
use tower::ServiceExt;

fn validator(name: &str) -> jsonschema::Validator {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn app() -> Router {
    router(Arc::new(Arena::new(Config::default()).unwrap()))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json");
    let req = req
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

fn instance_json(g: &Graph, s: usize, t: usize, k: usize, tau: Option<usize>) -> Value {
    serde_json::from_str(&Instance::new(g.clone(), s, t, k, tau).unwrap().to_json()).unwrap()
}

async fn create(app: &Router, instance: Value, role: &str) -> (String, Value) {
    let (status, body) = call(
        app,
        Method::POST,
        "/v1/games",
        Some(json!({"instance": instance, "humanRole": role})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (
        body["id"].as_str().unwrap().to_string(),
        body["state"].clone(),
    )
}

#[tokio::test]
async fn p3_facilitator_never_gets_past_not_winning() {
    let app = app();
    let (id, state) = create(
        &app,
        instance_json(&Graph::path(3), 0, 2, 1, None),
        "Facilitator",
    )
    .await;
    assert_eq!(state["d"], json!([1]));
    assert_eq!(state["annotation"]["verdict"], "NotWinning");
    assert_eq!(state["annotation"]["dividerWinsForever"], true);
    for _ in 0..4 {
        let (status, state) = call(
            &app,
            Method::POST,
            &format!("/v1/games/{id}/move"),
            Some(json!({"pair": [0, 2]})),
        )
        .await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(state["status"], "InProgress");
        assert_eq!(state["annotation"]["verdict"], "NotWinning");
    }
    let (_, state) = call(&app, Method::GET, &format!("/v1/games/{id}"), None).await;
    assert_eq!(state["stepsUsed"], 4);
}

#[tokio::test]
async fn engine_divider_opens_inside_the_clique() {
    let app = app();
    let inst = clique_spider(3).unwrap();
    let clique = inst.layout.as_ref().unwrap()["u"].clone();
    let (_, state) = create(
        &app,
        serde_json::from_str(&inst.to_json()).unwrap(),
        "Facilitator",
    )
    .await;
    for v in state["d"].as_array().unwrap() {
        assert!(clique.contains(&(v.as_u64().unwrap() as usize)), "{state}");
    }
    assert_eq!(state["annotation"]["level"], "inf");
}

#[tokio::test]
async fn human_divider_is_asked_to_place() {
    let app = app();
    let (id, state) = create(
        &app,
        instance_json(&Graph::path(3), 0, 2, 1, None),
        "Divider",
    )
    .await;
    assert_eq!(state["awaitingPlacement"], true);
    let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
    assert_eq!(hints, json!([{"vertices": [1], "level": "inf"}]));
    let (status, err) = call(
        &app,
        Method::POST,
        &format!("/v1/games/{id}/move"),
        Some(json!({"agents": [1]})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "awaiting-placement");
    let (status, state) = call(
        &app,
        Method::POST,
        &format!("/v1/games/{id}/placement"),
        Some(json!({"vertices": [1]})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state["turn"], "divider");
    assert_eq!(state["stepsUsed"], 1);
}

#[tokio::test]
async fn equal_endpoints_are_won_at_once() {
    let app = app();
    let (id, state) = create(
        &app,
        instance_json(&Graph::path(3), 1, 1, 1, None),
        "Divider",
    )
    .await;
    assert_eq!(state["status"], "FacilitatorWon");
    let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
    assert_eq!(hints, json!([]));
}

#[tokio::test]
async fn meeting_on_a_free_neighbor_wins() {
    let app = app();
    let (id, state) = create(
        &app,
        instance_json(&Graph::cycle(4), 0, 2, 1, None),
        "Facilitator",
    )
    .await;
    assert_eq!(state["annotation"]["level"], 1);
    let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
    let top = &hints[0];
    assert_eq!(top["level"], 0);
    let (a, b) = (top["pair"][0].clone(), top["pair"][1].clone());
    assert_eq!(a, b);
    let (_, state) = call(
        &app,
        Method::POST,
        &format!("/v1/games/{id}/move"),
        Some(json!({"pair": [a, b]})),
    )
    .await;
    assert_eq!(state["status"], "FacilitatorWon");
    let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
    assert_eq!(hints, json!([]));
    let (status, err) = call(
        &app,
        Method::POST,
        &format!("/v1/games/{id}/move"),
        Some(json!({"pair": [0, 2]})),
    )
    .await;
    assert_eq!(
        (status, err["code"].clone()),
        (StatusCode::CONFLICT, json!("game-over"))
    );
}

#[tokio::test]
async fn moving_onto_a_divider_is_rejected() {
    let app = app();
    let (id, state) = create(
        &app,
        instance_json(&Graph::path(3), 0, 2, 1, None),
        "Facilitator",
    )
    .await;
    assert_eq!(state["d"], json!([1]));
    let (status, err) = call(
        &app,
        Method::POST,
        &format!("/v1/games/{id}/move"),
        Some(json!({"pair": [1, 2]})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "illegal-move");
    assert_eq!(err["legalMoves"], json!([{"pair": [0, 2]}]));
}

#[tokio::test]
async fn divider_hints_shadow_on_the_clique_spider() {
    let app = app();
    let inst = clique_spider(3).unwrap();
    let clique: Vec<usize> = inst.layout.as_ref().unwrap()["u"].clone();
    let (id, _) = create(
        &app,
        serde_json::from_str(&inst.to_json()).unwrap(),
        "Divider",
    )
    .await;
    let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
    let top = &hints[0];
    assert_eq!(top["level"], "inf");
    let verts: Vec<usize> = serde_json::from_value(top["vertices"].clone()).unwrap();
    assert!(verts.iter().all(|v| clique.contains(v)), "{top}");
    let (_, state) = call(
        &app,
        Method::POST,
        &format!("/v1/games/{id}/placement"),
        Some(json!({"vertices": verts})),
    )
    .await;
    assert_eq!(state["turn"], "divider");
    let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
    assert_eq!(hints[0]["level"], "inf");
}

#[tokio::test]
async fn errors_have_codes() {
    let app = router(Arc::new(
        Arena::new(Config {
            budget: 10,
            log: None,
        })
        .unwrap(),
    ));
    let (status, err) = call(
        &app,
        Method::POST,
        "/v1/games",
        Some(json!({"instance": instance_json(&Graph::cycle(8), 0, 4, 2, None), "humanRole": "Facilitator"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["code"], "budget-exceeded");
    assert!(err["message"].as_str().unwrap().contains("positions"));

    let bad = json!({"instance": {"n": 3, "edges": [[0, 1]], "s": 0, "t": 2, "k": 1}, "humanRole": "Divider"});
    let (status, err) = call(&app, Method::POST, "/v1/games", Some(bad)).await;
    assert_eq!(
        (status, err["code"].clone()),
        (StatusCode::BAD_REQUEST, json!("disconnected"))
    );

    let (status, err) = call(
        &app,
        Method::POST,
        "/v1/games",
        Some(json!({"humanRole": 3})),
    )
    .await;
    assert_eq!(
        (status, err["code"].clone()),
        (StatusCode::BAD_REQUEST, json!("bad-request"))
    );

    let (status, err) = call(&app, Method::GET, "/v1/games/nope", None).await;
    assert_eq!(
        (status, err["code"].clone()),
        (StatusCode::NOT_FOUND, json!("not-found"))
    );

    let (status, _) = call(&app, Method::DELETE, "/v1/games/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn deleted_games_are_gone() {
    let app = app();
    let (id, _) = create(
        &app,
        instance_json(&Graph::path(3), 0, 2, 1, None),
        "Facilitator",
    )
    .await;
    let (status, _) = call(&app, Method::DELETE, &format!("/v1/games/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, Method::GET, &format!("/v1/games/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

fn state_position(g: &Graph, state: &Value) -> (FacPlacement, DivPlacement) {
    let f: [usize; 2] = serde_json::from_value(state["f"].clone()).unwrap();
    let d: Vec<usize> = serde_json::from_value(state["d"].clone()).unwrap();
    assert!(f.iter().chain(&d).all(|&v| v < g.n()));
    (FacPlacement::new(f[0], f[1]), DivPlacement::new(d))
}

/// Random submissions are accepted exactly when they are legal.
#[tokio::test]
async fn fuzzed_moves_respect_the_rules() {
    let app = app();
    let (state_schema, error_schema) = (
        validator("arena-state.schema.json"),
        validator("arena-error.schema.json"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut accepted, mut rejected) = (0, 0);
    for game in 0..40u64 {
        let n = rng.random_range(4..=7);
        let g = random_connected_graph(n, 0.45, game).unwrap();
        let k = rng.random_range(1..=2);
        let tau = if rng.random_bool(0.5) {
            Some(rng.random_range(2..=6))
        } else {
            None
        };
        let role = if game % 2 == 0 {
            "Facilitator"
        } else {
            "Divider"
        };
        let (s, t) = (0, n - 1);
        let (id, mut state) = create(&app, instance_json(&g, s, t, k, tau), role).await;
        assert!(state_schema.is_valid(&state), "{state}");
        for _ in 0..25 {
            if state["status"] != "InProgress" {
                break;
            }
            let uri;
            let body;
            let legal: bool;
            if state["awaitingPlacement"] == true {
                let vs: Vec<usize> = (0..rng.random_range(k - 1..=k + 1))
                    .map(|_| rng.random_range(0..n))
                    .collect();
                legal = vs.len() == k && !vs.contains(&s) && !vs.contains(&t);
                uri = format!("/v1/games/{id}/placement");
                body = json!({"vertices": vs});
            } else {
                let (f, d) = state_position(&g, &state);
                assert!(d.compatible_with(&f));
                uri = format!("/v1/games/{id}/move");
                if role == "Facilitator" {
                    let pair = [rng.random_range(0..n), rng.random_range(0..n)];
                    legal = fac_moves(&g, &f, &d).contains(&FacPlacement::new(pair[0], pair[1]));
                    body = json!({"pair": pair});
                } else {
                    let agents: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
                    legal = div_moves(&g, &d, &f).contains(&DivPlacement::new(agents.clone()));
                    body = json!({"agents": agents});
                }
            }
            let (status, out) = call(&app, Method::POST, &uri, Some(body)).await;
            let schema = if status == StatusCode::OK {
                &state_schema
            } else {
                &error_schema
            };
            assert!(schema.is_valid(&out), "{out}");
            if legal {
                assert_eq!(status, StatusCode::OK, "{out}");
                // the engine's reply must be legal as well
                if out["status"] == "InProgress" {
                    let (f2, d2) = state_position(&g, &out);
                    assert!(d2.compatible_with(&f2));
                }
                state = out;
                accepted += 1;
            } else {
                assert_eq!(status, StatusCode::CONFLICT, "{out}");
                assert_eq!(out["code"], "illegal-move");
                rejected += 1;
                let (_, now) = call(&app, Method::GET, &format!("/v1/games/{id}"), None).await;
                assert_eq!(now, state);
            }
        }
    }
    assert!(accepted > 20 && rejected > 20, "{accepted} {rejected}");
}

/// On instances Divider wins, no scripted Facilitator beats the engine.
#[test]
fn engine_divider_is_never_beaten() {
    let arena = Arena::new(Config::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut games = 0;
    let mut corpus: Vec<Instance> = Vec::new();
    for seed in 0..120u64 {
        let n = 5 + seed as usize % 6;
        let g = random_connected_graph(n, 0.35, seed).unwrap();
        for k in 1..=2 {
            if !g.adjacent(0, n - 1) && !facilitator_wins(&g, 0, n - 1, k).unwrap() {
                corpus.push(Instance::new(g.clone(), 0, n - 1, k, None).unwrap());
            }
        }
    }
    corpus.push(clique_spider(3).unwrap());
    for inst in corpus {
        let g = inst.graph.clone();
        for script in 0..3 {
            let (id, _) = arena.create(inst.clone(), Role::Facilitator).unwrap();
            arena
                .with_session(&id, |s| {
                    for _ in 0..30 {
                        let pos = s.position().unwrap();
                        let options = fac_moves(&g, &pos.f, &pos.d);
                        let pick = match script {
                            // follow the hints
                            0 => {
                                let h = &s.hints()[0];
                                let p: [usize; 2] =
                                    serde_json::from_value(h["pair"].clone()).unwrap();
                                FacPlacement::new(p[0], p[1])
                            }
                            // close the distance greedily
                            1 => *options
                                .iter()
                                .min_by_key(|f| {
                                    g.distance(pos.d.agents(), f.vertices()[0], f.vertices()[1])
                                })
                                .unwrap(),
                            _ => options[rng.random_range(0..options.len())],
                        };
                        s.submit(Action::Pair {
                            pair: pick.vertices(),
                        })?;
                        assert_eq!(s.status(), Status::InProgress);
                    }
                    Ok(())
                })
                .unwrap();
            games += 1;
        }
    }
    assert!(games >= 60, "{games}");
}

#[tokio::test]
async fn log_replays_to_live_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.jsonl");
    let arena = Arc::new(
        Arena::new(Config {
            log: Some(path.clone()),
            ..Config::default()
        })
        .unwrap(),
    );
    let app = router(arena.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ids = Vec::new();
    for game in 0..12u64 {
        let g = random_connected_graph(6, 0.5, game).unwrap();
        let role = if game % 2 == 0 {
            "Facilitator"
        } else {
            "Divider"
        };
        let (id, mut state) = create(&app, instance_json(&g, 0, 5, 1, None), role).await;
        for _ in 0..8 {
            if state["status"] != "InProgress" {
                break;
            }
            let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
            let pick = hints[rng.random_range(0..hints.as_array().unwrap().len())].clone();
            let (uri, body) = if let Some(v) = pick.get("vertices") {
                (format!("/v1/games/{id}/placement"), json!({"vertices": v}))
            } else if let Some(p) = pick.get("pair") {
                (format!("/v1/games/{id}/move"), json!({"pair": p}))
            } else {
                (
                    format!("/v1/games/{id}/move"),
                    json!({"agents": pick["agents"]}),
                )
            };
            let (status, out) = call(&app, Method::POST, &uri, Some(body)).await;
            assert_eq!(status, StatusCode::OK);
            state = out;
        }
        ids.push(id);
    }
    call(&app, Method::DELETE, &format!("/v1/games/{}", ids[0]), None).await;

    let text = std::fs::read_to_string(&path).unwrap();
    let fresh = Arena::new(Config::default()).unwrap();
    let replayed = fresh.replay_log(&text).unwrap();
    assert_eq!(replayed.len(), ids.len() - 1);
    for id in &ids[1..] {
        let (_, live) = call(&app, Method::GET, &format!("/v1/games/{id}"), None).await;
        assert_eq!(serde_json::to_value(replayed[id].state()).unwrap(), live);
    }
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_sessions_stay_independent() {
    let app = app();
    let mut handles = Vec::new();
    for i in 0..16usize {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            let g = Graph::cycle(5 + i % 4);
            let (id, _) = create(&app, instance_json(&g, 0, 2, 1, None), "Facilitator").await;
            let mut steps = 0;
            loop {
                let (_, hints) =
                    call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
                let Some(top) = hints.as_array().unwrap().first().cloned() else {
                    break;
                };
                let (status, state) = call(
                    &app,
                    Method::POST,
                    &format!("/v1/games/{id}/move"),
                    Some(json!({"pair": top["pair"]})),
                )
                .await;
                assert_eq!(status, StatusCode::OK);
                steps += 1;
                if state["status"] != "InProgress" {
                    return (state["status"].clone(), steps);
                }
                assert!(steps < 20);
            }
            unreachable!("an unfinished game always has hints")
        }));
    }
    for h in handles {
        let (status, steps) = h.await.unwrap();
        assert_eq!(status, "FacilitatorWon");
        assert!(steps >= 1);
    }
}

#[tokio::test]
async fn clique_spider_scripted_play() {
    let app = app();
    let inst = clique_spider(3).unwrap();
    for k in [2, 1] {
        let mut body: Value = serde_json::from_str(&inst.to_json()).unwrap();
        body["k"] = json!(k);
        let (id, mut state) = create(&app, body, "Facilitator").await;
        for _ in 0..20 {
            if state["status"] != "InProgress" {
                break;
            }
            let (_, hints) = call(&app, Method::GET, &format!("/v1/games/{id}/hints"), None).await;
            let pair = hints[0]["pair"].clone();
            state = call(
                &app,
                Method::POST,
                &format!("/v1/games/{id}/move"),
                Some(json!({"pair": pair})),
            )
            .await
            .1;
        }
        let expected = if k == 2 {
            "InProgress"
        } else {
            "FacilitatorWon"
        };
        assert_eq!(state["status"], expected, "k={k}");
    }
}
