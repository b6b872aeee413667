//! One game between a human and the engine, driven entirely by events so
//! that a recorded log replays to the same state.

use std::sync::Arc;

use rendezvous::game::{
    best_moves, div_moves, fac_moves, DivPlacement, FacPlacement, Level, Position, Turn, WinTable,
};
use rendezvous::graph::parse_instance;
use rendezvous::{Instance, InstanceError, Vertex};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    #[serde(alias = "facilitator")]
    Facilitator,
    #[serde(alias = "divider")]
    Divider,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    InProgress,
    FacilitatorWon,
    DividerSurvived,
}

/// A move as submitted over the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Action {
    Pair { pair: [Vertex; 2] },
    Agents { agents: Vec<Vertex> },
}

/// Log entries. Engine replies are recorded like human moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Created {
        instance: Value,
        #[serde(rename = "humanRole")]
        human_role: Role,
    },
    Placed {
        vertices: Vec<Vertex>,
    },
    Pair {
        pair: [Vertex; 2],
    },
    Agents {
        agents: Vec<Vertex>,
    },
    Deleted,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlayError {
    #[error("no game with id {0}")]
    NotFound(String),
    #[error("it is {0:?}'s turn")]
    WrongTurn(Role),
    #[error("{message}")]
    Illegal { message: String, legal: Vec<Value> },
    #[error("the game is over")]
    Finished,
    #[error("the Divider opening placement is still pending")]
    AwaitingPlacement,
    #[error("the opening placement has already been made")]
    AlreadyPlaced,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    BadRequest(String),
}

impl PlayError {
    pub fn code(&self) -> &'static str {
        match self {
            PlayError::NotFound(_) => "not-found",
            PlayError::WrongTurn(_) => "wrong-turn",
            PlayError::Illegal { .. } => "illegal-move",
            PlayError::Finished => "game-over",
            PlayError::AwaitingPlacement => "awaiting-placement",
            PlayError::AlreadyPlaced => "already-placed",
            PlayError::Instance(e) => e.code(),
            PlayError::Budget(_) => "budget-exceeded",
            PlayError::BadRequest(_) => "bad-request",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Annotation {
    pub level: Level,
    pub verdict: &'static str,
    pub divider_wins_forever: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_tau: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct State {
    pub turn: Turn,
    pub f: [Vertex; 2],
    pub d: Vec<Vertex>,
    pub steps_used: usize,
    pub tau: Option<usize>,
    pub status: Status,
    pub annotation: Option<Annotation>,
    pub human_role: Role,
    pub awaiting_placement: bool,
}

pub struct Session {
    pub id: String,
    instance: Instance,
    table: Arc<WinTable>,
    human: Role,
    f: FacPlacement,
    d: Option<DivPlacement>,
    turn: Turn,
    steps: usize,
    status: Status,
    events: Vec<Event>,
}

impl Session {
    /// A fresh session with only the creation event applied.
    pub fn start(id: String, instance: Instance, human: Role, table: Arc<WinTable>) -> Self {
        assert_eq!(table.k(), instance.k, "table built for another team size");
        let created = Event::Created {
            instance: serde_json::from_str(&instance.to_json()).expect("instance JSON round trip"),
            human_role: human,
        };
        let (s, t) = (instance.s, instance.t);
        let status = if s == t {
            Status::FacilitatorWon
        } else {
            Status::InProgress
        };
        Session {
            id,
            instance,
            table,
            human,
            f: FacPlacement::new(s, t),
            d: None,
            turn: Turn::Divider,
            steps: 0,
            status,
            events: vec![created],
        }
    }

    /// Starts a session and lets the engine make its opening move if it has one.
    pub fn create(id: String, instance: Instance, human: Role, table: Arc<WinTable>) -> Self {
        let mut session = Session::start(id, instance, human, table);
        session.engine_reply();
        session
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn human(&self) -> Role {
        self.human
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn position(&self) -> Option<Position> {
        self.d
            .as_ref()
            .map(|d| Position::new(self.f, d.clone(), self.turn))
    }

    /// Human opening placement.
    pub fn place(&mut self, vertices: Vec<Vertex>) -> Result<(), PlayError> {
        self.check_human_turn(Role::Divider)?;
        if self.d.is_some() {
            return Err(PlayError::AlreadyPlaced);
        }
        self.apply(Event::Placed { vertices })?;
        self.engine_reply();
        Ok(())
    }

    /// Human move followed by the engine's reply.
    pub fn submit(&mut self, action: Action) -> Result<(), PlayError> {
        let role = match action {
            Action::Pair { .. } => Role::Facilitator,
            Action::Agents { .. } => Role::Divider,
        };
        self.check_human_turn(role)?;
        if self.d.is_none() {
            return Err(PlayError::AwaitingPlacement);
        }
        self.apply(match action {
            Action::Pair { pair } => Event::Pair { pair },
            Action::Agents { agents } => Event::Agents { agents },
        })?;
        self.engine_reply();
        Ok(())
    }

    fn check_human_turn(&self, role: Role) -> Result<(), PlayError> {
        if self.status != Status::InProgress {
            return Err(PlayError::Finished);
        }
        if role != self.human {
            return Err(PlayError::BadRequest(format!(
                "the human plays {:?}",
                self.human
            )));
        }
        if role_of(self.turn) != self.human {
            return Err(PlayError::WrongTurn(role_of(self.turn)));
        }
        Ok(())
    }

    /// Engine moves until it is the human's turn or the game ends.
    fn engine_reply(&mut self) {
        while self.status == Status::InProgress && role_of(self.turn) != self.human {
            let event = match &self.d {
                None => {
                    let placement = self.engine_placement();
                    Event::Placed {
                        vertices: placement.agents().to_vec(),
                    }
                }
                Some(_) => {
                    let pos = self.position().expect("placed");
                    let hints = best_moves(&self.instance.graph, &self.table, &pos);
                    match hints
                        .into_iter()
                        .next()
                        .expect("the side to move always has a legal move")
                        .mv
                    {
                        rendezvous::game::Move::Facilitator(f) => {
                            Event::Pair { pair: f.vertices() }
                        }
                        rendezvous::game::Move::Divider(d) => Event::Agents {
                            agents: d.agents().to_vec(),
                        },
                    }
                }
            };
            self.apply(event).expect("engine moves are legal");
        }
    }

    /// The first placement of greatest level in canonical order.
    fn engine_placement(&self) -> DivPlacement {
        let f = FacPlacement::new(self.instance.s, self.instance.t);
        let mut best: Option<(Level, DivPlacement)> = None;
        for d in self
            .table
            .initial_placements(self.instance.s, self.instance.t)
        {
            let l = self.table.level(&f, &d);
            if best.as_ref().is_none_or(|(b, _)| l > *b) {
                best = Some((l, d));
            }
        }
        best.expect("some vertex avoids s and t").1
    }

    /// Validates and applies one event. Shared by live play and replay.
    pub fn apply(&mut self, event: Event) -> Result<(), PlayError> {
        if self.status != Status::InProgress {
            return Err(PlayError::Finished);
        }
        let g = &self.instance.graph;
        match &event {
            Event::Created { .. } | Event::Deleted => {
                return Err(PlayError::BadRequest("not a game move".into()));
            }
            Event::Placed { vertices } => {
                if self.d.is_some() {
                    return Err(PlayError::AlreadyPlaced);
                }
                let (s, t, k, n) = (self.instance.s, self.instance.t, self.instance.k, g.n());
                let ok = vertices.len() == k && vertices.iter().all(|&v| v < n && v != s && v != t);
                if !ok {
                    let legal = self.table.initial_placements(s, t);
                    return Err(PlayError::Illegal {
                        message: format!(
                            "a placement is {k} vertices of 0..{n} avoiding s = {s} and t = {t}"
                        ),
                        legal: legal
                            .iter()
                            .map(|d| serde_json::json!({ "vertices": d }))
                            .collect(),
                    });
                }
                self.d = Some(DivPlacement::new(vertices.clone()));
                self.turn = Turn::Facilitator;
            }
            Event::Pair { pair } => {
                let d = self.d.as_ref().ok_or(PlayError::AwaitingPlacement)?;
                if self.turn != Turn::Facilitator {
                    return Err(PlayError::WrongTurn(Role::Divider));
                }
                let target = FacPlacement::new(pair[0], pair[1]);
                let legal = fac_moves(g, &self.f, d);
                if !legal.contains(&target) {
                    return Err(PlayError::Illegal {
                        message: format!(
                            "{{{},{}}} is not reachable from {} without entering a Divider vertex",
                            pair[0], pair[1], self.f
                        ),
                        legal: legal
                            .iter()
                            .map(|f| serde_json::json!({ "pair": f }))
                            .collect(),
                    });
                }
                self.f = target;
                self.steps += 1;
                if target.is_meeting() {
                    self.status = Status::FacilitatorWon;
                } else if self.instance.tau == Some(self.steps) {
                    self.status = Status::DividerSurvived;
                } else {
                    self.turn = Turn::Divider;
                }
            }
            Event::Agents { agents } => {
                let d = self.d.as_ref().ok_or(PlayError::AwaitingPlacement)?;
                if self.turn != Turn::Divider {
                    return Err(PlayError::WrongTurn(Role::Facilitator));
                }
                let target = DivPlacement::new(agents.clone());
                let legal = div_moves(g, d, &self.f);
                if !legal.contains(&target) {
                    return Err(PlayError::Illegal {
                        message: format!(
                            "{agents:?} is not one step from {d:?} avoiding the Facilitator agents"
                        ),
                        legal: legal
                            .iter()
                            .map(|d| serde_json::json!({ "agents": d }))
                            .collect(),
                    });
                }
                self.d = Some(target);
                self.turn = Turn::Facilitator;
            }
        }
        self.events.push(event);
        Ok(())
    }

    /// Level of the current position for the side to move.
    fn level(&self) -> Level {
        let (s, t) = (self.instance.s, self.instance.t);
        match (&self.d, self.turn) {
            (None, _) => self.table.start_level(s, t),
            (Some(d), Turn::Facilitator) => self.table.level(&self.f, d),
            (Some(d), Turn::Divider) => div_moves(&self.instance.graph, d, &self.f)
                .iter()
                .map(|d2| self.table.level(&self.f, d2))
                .max()
                .unwrap_or(Level::At(0)),
        }
    }

    pub fn state(&self) -> State {
        let annotation = (self.status == Status::InProgress).then(|| {
            let level = self.level();
            let remaining = self.instance.tau.map(|tau| tau - self.steps);
            Annotation {
                level,
                verdict: if level == Level::NotWinning {
                    "NotWinning"
                } else {
                    "Winning"
                },
                divider_wins_forever: level == Level::NotWinning && remaining.is_none(),
                within_tau: remaining.map(|r| level.within(r)),
            }
        });
        State {
            turn: self.turn,
            f: self.f.vertices(),
            d: self
                .d
                .as_ref()
                .map(|d| d.agents().to_vec())
                .unwrap_or_default(),
            steps_used: self.steps,
            tau: self.instance.tau,
            status: self.status,
            annotation,
            human_role: self.human,
            awaiting_placement: self.d.is_none() && self.status == Status::InProgress,
        }
    }

    /// Moves for the human with their resulting levels, best first.
    pub fn hints(&self) -> Vec<Value> {
        if self.status != Status::InProgress || role_of(self.turn) != self.human {
            return Vec::new();
        }
        match self.position() {
            Some(pos) => best_moves(&self.instance.graph, &self.table, &pos)
                .into_iter()
                .map(|h| serde_json::to_value(h).expect("hint serialization"))
                .collect(),
            None => {
                let f = FacPlacement::new(self.instance.s, self.instance.t);
                let mut placements: Vec<(Level, DivPlacement)> = self
                    .table
                    .initial_placements(self.instance.s, self.instance.t)
                    .into_iter()
                    .map(|d| (self.table.level(&f, &d), d))
                    .collect();
                placements.sort_by_key(|(l, _)| std::cmp::Reverse(*l));
                placements
                    .into_iter()
                    .map(|(level, d)| serde_json::json!({ "vertices": d, "level": level }))
                    .collect()
            }
        }
    }

    /// Rebuilds a session from its log. `table` supplies the win table for
    /// the recorded instance.
    pub fn replay(
        id: String,
        events: &[Event],
        table: impl FnOnce(&Instance) -> Result<Arc<WinTable>, PlayError>,
    ) -> Result<Self, PlayError> {
        let Some(Event::Created {
            instance,
            human_role,
        }) = events.first()
        else {
            return Err(PlayError::BadRequest(
                "log does not start with a creation event".into(),
            ));
        };
        let instance = parse_instance(&instance.to_string())?;
        let table = table(&instance)?;
        let mut session = Session::start(id, instance, *human_role, table);
        for e in &events[1..] {
            session.apply(e.clone())?;
        }
        Ok(session)
    }
}

fn role_of(turn: Turn) -> Role {
    match turn {
        Turn::Facilitator => Role::Facilitator,
        Turn::Divider => Role::Divider,
    }
}
