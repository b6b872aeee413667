use serde::Serialize;

use super::{div_moves, fac_moves, Level, Position, Turn, WinTable};
use crate::graph::Graph;

use super::{DivPlacement, FacPlacement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Move {
    #[serde(rename = "pair")]
    Facilitator(FacPlacement),
    #[serde(rename = "agents")]
    Divider(DivPlacement),
}

/// A legal move and the level it leads to under optimal play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hint {
    #[serde(flatten)]
    pub mv: Move,
    pub level: Level,
}

/// Legal moves for the side to move, best first. Facilitator moves are
/// ranked by the worst level Divider can reach after them, Divider replies
/// by the level they leave; ties keep canonical move order.
pub fn best_moves(g: &Graph, table: &WinTable, pos: &Position) -> Vec<Hint> {
    if pos.f.is_meeting() {
        return Vec::new();
    }
    match pos.turn {
        Turn::Facilitator => {
            let mut hints: Vec<Hint> = fac_moves(g, &pos.f, &pos.d)
                .into_iter()
                .map(|f2| {
                    let level = if f2.is_meeting() {
                        Level::At(0)
                    } else {
                        div_moves(g, &pos.d, &f2)
                            .iter()
                            .map(|d2| table.level(&f2, d2))
                            .max()
                            .unwrap_or(Level::At(0))
                    };
                    Hint {
                        mv: Move::Facilitator(f2),
                        level,
                    }
                })
                .collect();
            hints.sort_by_key(|h| h.level);
            hints
        }
        Turn::Divider => {
            let mut hints: Vec<Hint> = div_moves(g, &pos.d, &pos.f)
                .into_iter()
                .map(|d2| Hint {
                    level: table.level(&pos.f, &d2),
                    mv: Move::Divider(d2),
                })
                .collect();
            hints.sort_by_key(|h| std::cmp::Reverse(h.level));
            hints
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finished_positions_have_no_hints() {
        let k3 = Graph::complete(3);
        let table = WinTable::build(&k3, 1, u128::MAX).unwrap();
        let pos = Position::new(
            FacPlacement::new(1, 1),
            DivPlacement::new(vec![2]),
            Turn::Facilitator,
        );
        assert!(best_moves(&k3, &table, &pos).is_empty());
    }

    #[test]
    fn facilitator_hint_meets_on_triangle() {
        let k3 = Graph::complete(3);
        let table = WinTable::build(&k3, 1, u128::MAX).unwrap();
        let pos = Position::new(
            FacPlacement::new(0, 1),
            DivPlacement::new(vec![2]),
            Turn::Facilitator,
        );
        let hints = best_moves(&k3, &table, &pos);
        assert_eq!(
            hints[0],
            Hint {
                mv: Move::Facilitator(FacPlacement::new(0, 0)),
                level: Level::At(0)
            }
        );
        assert_eq!(hints.len(), 3);
        assert_eq!(hints[2].level, Level::At(1));
        let json = serde_json::to_string(&hints[0]).unwrap();
        assert_eq!(json, r#"{"pair":[0,0],"level":0}"#);
    }

    #[test]
    fn divider_on_path_stays() {
        let p3 = Graph::path(3);
        let table = WinTable::build(&p3, 1, u128::MAX).unwrap();
        let pos = Position::new(
            FacPlacement::new(0, 2),
            DivPlacement::new(vec![1]),
            Turn::Divider,
        );
        let hints = best_moves(&p3, &table, &pos);
        assert_eq!(
            hints,
            vec![Hint {
                mv: Move::Divider(DivPlacement::new(vec![1])),
                level: Level::NotWinning
            }]
        );
        assert_eq!(
            serde_json::to_string(&hints[0]).unwrap(),
            r#"{"agents":[1],"level":"inf"}"#
        );
    }
}
