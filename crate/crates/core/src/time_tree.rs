//! Sparse calendar index: Root → Year → Month → Day → Hour → Minute → Second.
//!
//! Nodes exist only for instants that something referenced. Each non-root
//! node has one `CONTAINS` parent, and every level keeps a single `NEXT`
//! chain ordered by timestamp across parent boundaries, so `08:59:59` links
//! to `09:00:00` when both exist.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::time::{Level, TimeWindow, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstantId(u32);

impl InstantId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for InstantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// One node of the time-tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeInstant {
    pub id: InstantId,
    pub level: Level,
    /// Calendar component at `level` (hour 0-23, month 1-12, ...). Zero for Root.
    pub value: i64,
    /// First second of the span this node denotes.
    pub utc_key: Timestamp,
}

impl TimeInstant {
    pub fn span(&self) -> TimeWindow {
        match self.level {
            Level::Root => TimeWindow::all(),
            level => TimeWindow::span(self.utc_key, level),
        }
    }

    /// The timestamp prefix this node denotes, e.g. `2016-06-09T08` for an hour.
    pub fn prefix(&self) -> String {
        let full = self.utc_key.to_string();
        let len = match self.level {
            Level::Root => 0,
            Level::Year => 4,
            Level::Month => 7,
            Level::Day => 10,
            Level::Hour => 13,
            Level::Minute => 16,
            Level::Second => 19,
        };
        full[..len].to_owned()
    }
}

#[derive(Debug, Clone)]
struct Slot {
    instant: TimeInstant,
    parent: Option<InstantId>,
    prev: Option<InstantId>,
    next: Option<InstantId>,
    children: Vec<InstantId>,
}

#[derive(Debug, Clone)]
pub struct TimeTree {
    slots: Vec<Slot>,
    levels: [BTreeMap<Timestamp, InstantId>; 7],
}

/// Id-free description of a tree, used to compare trees built in different orders.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeShape {
    pub nodes: BTreeSet<(Level, Timestamp)>,
    pub contains: BTreeSet<((Level, Timestamp), (Level, Timestamp))>,
    pub next: BTreeSet<((Level, Timestamp), (Level, Timestamp))>,
}

impl Default for TimeTree {
    fn default() -> Self {
        Self::new()
    }
}

impl TimeTree {
    pub fn new() -> Self {
        let root = TimeInstant {
            id: InstantId(0),
            level: Level::Root,
            value: 0,
            utc_key: TimeWindow::all().start(),
        };
        let mut levels: [BTreeMap<Timestamp, InstantId>; 7] = Default::default();
        levels[Level::Root.index()].insert(root.utc_key, root.id);
        TimeTree {
            slots: vec![Slot {
                instant: root,
                parent: None,
                prev: None,
                next: None,
                children: Vec::new(),
            }],
            levels,
        }
    }

    pub fn root(&self) -> &TimeInstant {
        &self.slots[0].instant
    }

    /// Number of nodes including the root.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.len() == 1
    }

    pub fn level_len(&self, level: Level) -> usize {
        self.levels[level.index()].len()
    }

    pub fn get(&self, id: InstantId) -> Option<&TimeInstant> {
        self.slots.get(id.index()).map(|s| &s.instant)
    }

    pub fn instant(&self, id: InstantId) -> &TimeInstant {
        &self.slots[id.index()].instant
    }

    pub fn parent(&self, id: InstantId) -> Option<InstantId> {
        self.slots[id.index()].parent
    }

    pub fn next(&self, id: InstantId) -> Option<InstantId> {
        self.slots[id.index()].next
    }

    pub fn prev(&self, id: InstantId) -> Option<InstantId> {
        self.slots[id.index()].prev
    }

    /// Children in timestamp order.
    pub fn children(&self, id: InstantId) -> &[InstantId] {
        &self.slots[id.index()].children
    }

    /// Looks up an existing node without creating it.
    pub fn find(&self, level: Level, ts: Timestamp) -> Option<InstantId> {
        self.levels[level.index()].get(&ts.truncate(level)).copied()
    }

    /// Returns the second leaf for `ts`, creating any missing nodes on the
    /// Root→Second path and splicing them into their level's `NEXT` chain.
    pub fn ensure_instant(&mut self, ts: Timestamp) -> TimeInstant {
        let mut parent = self.root().id;
        for level in &Level::ALL[1..] {
            parent = self.ensure_child(parent, *level, ts);
        }
        self.slots[parent.index()].instant
    }

    fn ensure_child(&mut self, parent: InstantId, level: Level, ts: Timestamp) -> InstantId {
        let key = ts.truncate(level);
        if let Some(&id) = self.levels[level.index()].get(&key) {
            return id;
        }
        let id = InstantId(u32::try_from(self.slots.len()).expect("time-tree exceeds u32 nodes"));
        let chain = &self.levels[level.index()];
        let prev = chain.range(..key).next_back().map(|(_, &id)| id);
        let next = chain.range(key..).next().map(|(_, &id)| id);
        self.slots.push(Slot {
            instant: TimeInstant {
                id,
                level,
                value: key.component(level),
                utc_key: key,
            },
            parent: Some(parent),
            prev,
            next,
            children: Vec::new(),
        });
        if let Some(p) = prev {
            self.slots[p.index()].next = Some(id);
        }
        if let Some(n) = next {
            self.slots[n.index()].prev = Some(id);
        }
        self.levels[level.index()].insert(key, id);

        let pos = {
            let slots = &self.slots;
            slots[parent.index()]
                .children
                .partition_point(|c| slots[c.index()].instant.utc_key < key)
        };
        self.slots[parent.index()].children.insert(pos, id);
        id
    }

    /// Existing second leaves in `w`, ascending. Never creates nodes.
    pub fn resolve_window(&self, w: &TimeWindow) -> Vec<TimeInstant> {
        self.leaves(w).copied().collect()
    }

    /// Walks the second-level `NEXT` chain from the first leaf at or after
    /// `w.start()` until it passes `w.end()`.
    pub fn leaves<'a>(&'a self, w: &TimeWindow) -> ChainWalk<'a> {
        let first = self.levels[Level::Second.index()]
            .range(w.start()..)
            .next()
            .map(|(_, &id)| id);
        ChainWalk {
            tree: self,
            cursor: first,
            end: w.end(),
        }
    }

    /// Existing nodes at `level` whose span intersects `w`, ascending.
    pub fn instants_at_level(&self, w: &TimeWindow, level: Level) -> Vec<TimeInstant> {
        if level == Level::Root {
            return vec![*self.root()];
        }
        let chain = &self.levels[level.index()];
        let first = chain
            .range(..=w.start())
            .next_back()
            .filter(|&(_, &id)| self.instant(id).span().end() >= w.start())
            .or_else(|| chain.range(w.start()..).next())
            .map(|(_, &id)| id);
        ChainWalk {
            tree: self,
            cursor: first,
            end: w.end(),
        }
        .copied()
        .collect()
    }

    /// All nodes in creation order, root first.
    pub fn iter(&self) -> impl Iterator<Item = &TimeInstant> {
        self.slots.iter().map(|s| &s.instant)
    }

    pub fn shape(&self) -> TreeShape {
        let key = |id: InstantId| {
            let i = self.instant(id);
            (i.level, i.utc_key)
        };
        let mut shape = TreeShape::default();
        for slot in &self.slots {
            let me = key(slot.instant.id);
            shape.nodes.insert(me);
            if let Some(p) = slot.parent {
                shape.contains.insert((key(p), me));
            }
            if let Some(n) = slot.next {
                shape.next.insert((me, key(n)));
            }
        }
        shape
    }
}

/// Iterator over one level's `NEXT` chain, stopping after `end`.
pub struct ChainWalk<'a> {
    tree: &'a TimeTree,
    cursor: Option<InstantId>,
    end: Timestamp,
}

impl<'a> Iterator for ChainWalk<'a> {
    type Item = &'a TimeInstant;

    fn next(&mut self) -> Option<Self::Item> {
        let id = self.cursor?;
        let slot = &self.tree.slots[id.index()];
        if slot.instant.utc_key > self.end {
            self.cursor = None;
            return None;
        }
        self.cursor = slot.next;
        Some(&slot.instant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> Timestamp {
        s.parse().unwrap()
    }

    fn window(a: &str, b: &str) -> TimeWindow {
        TimeWindow::new(ts(a), ts(b)).unwrap()
    }

    #[test]
    fn ensure_is_idempotent() {
        let mut tree = TimeTree::new();
        let a = tree.ensure_instant(ts("2016-06-09T08:00:00Z"));
        let size = tree.len();
        let b = tree.ensure_instant(ts("2016-06-09T08:00:00Z"));
        assert_eq!(a.id, b.id);
        assert_eq!(tree.len(), size);
        assert_eq!(size, 7);
        assert_eq!(a.level, Level::Second);
    }

    #[test]
    fn sparse_next_skips_missing_seconds() {
        let mut tree = TimeTree::new();
        let a = tree.ensure_instant(ts("2016-06-09T08:00:00Z"));
        let b = tree.ensure_instant(ts("2016-06-09T08:00:05Z"));
        assert_eq!(tree.next(a.id), Some(b.id));
        assert_eq!(tree.prev(b.id), Some(a.id));
        assert_eq!(tree.level_len(Level::Second), 2);
    }

    #[test]
    fn full_minute_chain() {
        let mut tree = TimeTree::new();
        let base = ts("2016-06-09T08:00:00Z");
        // Insert in a scrambled order to exercise splicing.
        for i in (0..60).map(|i| (i * 37) % 60) {
            tree.ensure_instant(base.offset(i).unwrap());
        }
        assert_eq!(tree.level_len(Level::Second), 60);
        let mut cur = tree.find(Level::Second, base).unwrap();
        let mut links = 0;
        while let Some(n) = tree.next(cur) {
            assert!(tree.instant(n).utc_key > tree.instant(cur).utc_key);
            cur = n;
            links += 1;
        }
        assert_eq!(links, 59);
        let minute = tree.find(Level::Minute, base).unwrap();
        assert_eq!(tree.children(minute).len(), 60);
    }

    #[test]
    fn chains_cross_parent_boundaries() {
        let mut tree = TimeTree::new();
        let a = tree.ensure_instant(ts("2016-06-09T08:59:59Z"));
        let b = tree.ensure_instant(ts("2016-06-09T09:00:00Z"));
        assert_eq!(tree.next(a.id), Some(b.id));
        let ha = tree.find(Level::Hour, a.utc_key).unwrap();
        let hb = tree.find(Level::Hour, b.utc_key).unwrap();
        assert_eq!(tree.next(ha), Some(hb));
    }

    #[test]
    fn resolve_window_hour() {
        let mut tree = TimeTree::new();
        let base = ts("2016-06-09T08:00:00Z");
        for i in 0..3600 {
            tree.ensure_instant(base.offset(i).unwrap());
        }
        tree.ensure_instant(ts("2016-06-09T09:00:00Z"));
        let leaves = tree.resolve_window(&window("2016-06-09T08:00:00Z", "2016-06-09T08:59:59Z"));
        assert_eq!(leaves.len(), 3600);
        assert!(tree
            .resolve_window(&window("2016-06-08T00:00:00Z", "2016-06-08T23:59:59Z"))
            .is_empty());
    }

    #[test]
    fn resolve_crosses_midnight_in_order() {
        let mut tree = TimeTree::new();
        let stamps = [
            "2016-06-10T00:00:03Z",
            "2016-06-09T23:59:58Z",
            "2016-06-10T00:00:00Z",
            "2016-06-09T23:59:59Z",
            "2016-06-09T12:00:00Z",
        ];
        for s in stamps {
            tree.ensure_instant(ts(s));
        }
        let got: Vec<_> = tree
            .resolve_window(&window("2016-06-09T23:00:00Z", "2016-06-10T01:00:00Z"))
            .iter()
            .map(|i| i.utc_key)
            .collect();
        let mut expected: Vec<_> = stamps
            .iter()
            .map(|s| ts(s))
            .filter(|t| *t >= ts("2016-06-09T23:00:00Z") && *t <= ts("2016-06-10T01:00:00Z"))
            .collect();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn level_queries() {
        let mut tree = TimeTree::new();
        for h in 6..23 {
            tree.ensure_instant(Timestamp::from_ymd_hms(2016, 6, 9, h, 15, 0).unwrap());
        }
        let day = window("2016-06-09T00:00:00Z", "2016-06-09T23:59:59Z");
        let hours = tree.instants_at_level(&day, Level::Hour);
        assert_eq!(hours.len(), 17);
        assert_eq!(hours.first().unwrap().value, 6);
        assert_eq!(hours.last().unwrap().value, 22);

        let inner = window("2016-06-09T08:10:00Z", "2016-06-09T08:20:00Z");
        let days = tree.instants_at_level(&inner, Level::Day);
        assert_eq!(days.len(), 1);
        assert_eq!(days[0].prefix(), "2016-06-09");
        assert_eq!(
            tree.instants_at_level(&inner, Level::Second),
            tree.resolve_window(&inner)
        );
        // A window starting mid-hour still sees the enclosing hour.
        let hours = tree.instants_at_level(&inner, Level::Hour);
        assert_eq!(hours.len(), 1);
        assert_eq!(hours[0].value, 8);
    }

    #[test]
    fn parents_reproduce_components() {
        let mut tree = TimeTree::new();
        let t = ts("2017-11-30T21:07:42Z");
        let leaf = tree.ensure_instant(t);
        let mut values = Vec::new();
        let mut cur = Some(leaf.id);
        while let Some(id) = cur {
            let i = tree.instant(id);
            if i.level != Level::Root {
                values.push(i.value);
            }
            cur = tree.parent(id);
        }
        values.reverse();
        assert_eq!(values, t.components().to_vec());
    }
}
