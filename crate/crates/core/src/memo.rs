//! Tabling: memoisation of open-recursive nondeterministic functions.
//!
//! Each memoised function owns one table mapping argument keys to an
//! [`Entry`]: the answers found so far and the consumers waiting on that key.
//! The first call on a key registers its consumer *before* evaluating the body,
//! so a left-recursive call on the same key finds the entry, suspends as a
//! consumer and is fed answers as the producer discovers them. Answers are
//! deduplicated per key, which bounds the total amount of work and makes left
//! recursion terminate.
//!
//! Tables are shared by every branch of the computation; they are never
//! copied or rolled back. They live as long as the handles that own them and
//! persist across successive runs of a [`Session`].

use std::any::Any;
use std::cell::{Cell, OnceCell, RefCell};
use std::hash::Hash;
use std::rc::{Rc, Weak};

use indexmap::{IndexMap, IndexSet};

use crate::nondet::{AfterRun, Agenda, Comp, Consumer, Session};

/// Sanitised snapshot of a memo table: each key with its answers, in
/// discovery order.
pub type Chart<K, V> = Vec<(K, Vec<V>)>;

type Body<S, K, V> = Rc<dyn Fn(&S, K) -> Comp<V>>;
type Group<K, V> = Rc<[Rec<K, V>]>;

struct Entry<V> {
    results: IndexSet<V>,
    consumers: Vec<Consumer<V>>,
}

struct Table<K, V> {
    entries: RefCell<IndexMap<K, Entry<V>>>,
    evaluations: Cell<u64>,
}

impl<K, V> Table<K, V>
where
    K: Clone + Eq + Hash,
    V: Clone + Eq + Hash,
{
    fn new() -> Self {
        Table {
            entries: RefCell::new(IndexMap::new()),
            evaluations: Cell::new(0),
        }
    }

    fn chart(&self) -> Chart<K, V> {
        self.entries
            .borrow()
            .iter()
            .map(|(k, e)| (k.clone(), e.results.iter().cloned().collect()))
            .collect()
    }
}

impl<K, V> AfterRun for Table<K, V> {
    // Once the agenda is empty every entry is complete, so the suspended
    // consumers can never be resumed again.
    fn after_run(&self) {
        for entry in self.entries.borrow_mut().values_mut() {
            entry.consumers.clear();
        }
    }
}

fn lookup_or_produce<S, K, V>(
    table: &Rc<Table<K, V>>,
    body: &Body<S, K, V>,
    bundle: &S,
    key: K,
    agenda: &Agenda,
    k: Consumer<V>,
) where
    S: Clone + 'static,
    K: Clone + Eq + Hash + 'static,
    V: Clone + Eq + Hash + 'static,
{
    let mut entries = table.entries.borrow_mut();
    if let Some(entry) = entries.get_mut(&key) {
        entry.consumers.push(Rc::clone(&k));
        let known: Vec<V> = entry.results.iter().cloned().collect();
        drop(entries);
        for v in known {
            agenda.resume(Rc::clone(&k), v);
        }
        return;
    }

    entries.insert(
        key.clone(),
        Entry {
            results: IndexSet::new(),
            consumers: vec![k],
        },
    );
    drop(entries);

    let producer: Consumer<V> = {
        let table = Rc::clone(table);
        let key = key.clone();
        Rc::new(move |agenda: &Agenda, y: V| {
            let mut entries = table.entries.borrow_mut();
            let entry = entries
                .get_mut(&key)
                .expect("entry exists once its producer runs");
            if !entry.results.insert(y.clone()) {
                return;
            }
            let waiting = entry.consumers.clone();
            drop(entries);
            for k in waiting {
                agenda.resume(k, y.clone());
            }
        })
    };
    let (table, body, bundle) = (Rc::clone(table), Rc::clone(body), bundle.clone());
    agenda.schedule(move |agenda| {
        table.evaluations.set(table.evaluations.get() + 1);
        body(&bundle, key).start(agenda, producer);
    });
}

/// A memoised open-recursive function: calls still take the bundle of fixed
/// points explicitly.
pub struct MemoFn<S, K, V> {
    table: Rc<Table<K, V>>,
    body: Body<S, K, V>,
}

impl<S, K, V> Clone for MemoFn<S, K, V> {
    fn clone(&self) -> Self {
        MemoFn {
            table: Rc::clone(&self.table),
            body: Rc::clone(&self.body),
        }
    }
}

impl<S, K, V> MemoFn<S, K, V>
where
    S: Clone + 'static,
    K: Clone + Eq + Hash + 'static,
    V: Clone + Eq + Hash + 'static,
{
    pub fn apply(&self, bundle: &S, key: K) -> Comp<V> {
        let (table, body, bundle) = (Rc::clone(&self.table), Rc::clone(&self.body), bundle.clone());
        Comp::from_fn(move |agenda, k| {
            lookup_or_produce(&table, &body, &bundle, key.clone(), agenda, k)
        })
    }

    pub fn chart(&self) -> Chart<K, V> {
        self.table.chart()
    }

    /// Number of times the body has been entered.
    pub fn evaluations(&self) -> u64 {
        self.table.evaluations.get()
    }
}

struct Slot<K, V> {
    call: OnceCell<Box<dyn Fn(K) -> Comp<V>>>,
}

impl<K, V> Slot<K, V> {
    fn empty() -> Rc<Self> {
        Rc::new(Slot {
            call: OnceCell::new(),
        })
    }

    fn call(&self, key: K) -> Comp<V> {
        (self
            .call
            .get()
            .expect("memoised function called before its group was tied"))(key)
    }
}

/// Reference to a memoised fixed point, as seen from inside the bodies of its
/// recursive group.
///
/// Holds the function weakly; the owning [`Memo`] handles keep it alive.
pub struct Rec<K, V>(Weak<Slot<K, V>>);

impl<K, V> Clone for Rec<K, V> {
    fn clone(&self) -> Self {
        Rec(Weak::clone(&self.0))
    }
}

impl<K: 'static, V: 'static> Rec<K, V> {
    pub fn call(&self, key: K) -> Comp<V> {
        self.0
            .upgrade()
            .expect("memoised function used after its handles were dropped")
            .call(key)
    }
}

/// Handle to a closed memoised function together with its table.
pub struct Memo<K, V> {
    slot: Rc<Slot<K, V>>,
    table: Rc<Table<K, V>>,
    group: Rc<Vec<Rc<dyn Any>>>,
}

impl<K, V> Clone for Memo<K, V> {
    fn clone(&self) -> Self {
        Memo {
            slot: Rc::clone(&self.slot),
            table: Rc::clone(&self.table),
            group: Rc::clone(&self.group),
        }
    }
}

impl<K, V> Memo<K, V>
where
    K: Clone + Eq + Hash + 'static,
    V: Clone + Eq + Hash + 'static,
{
    pub fn call(&self, key: K) -> Comp<V> {
        // The returned computation keeps the whole recursive group alive.
        let (slot, group) = (Rc::clone(&self.slot), Rc::clone(&self.group));
        Comp::from_fn(move |agenda, k| {
            let _alive = &group;
            slot.call(key.clone()).start(agenda, k)
        })
    }

    pub fn rec(&self) -> Rec<K, V> {
        Rec(Rc::downgrade(&self.slot))
    }

    /// Snapshot of the table with the suspended consumers stripped.
    pub fn chart(&self) -> Chart<K, V> {
        self.table.chart()
    }

    pub fn evaluations(&self) -> u64 {
        self.table.evaluations.get()
    }
}

fn tie<S, K, V>(slot: &Rc<Slot<K, V>>, open: MemoFn<S, K, V>, bundle: S)
where
    S: Clone + 'static,
    K: Clone + Eq + Hash + 'static,
    V: Clone + Eq + Hash + 'static,
{
    let installed = slot
        .call
        .set(Box::new(move |key| open.apply(&bundle, key)))
        .is_ok();
    debug_assert!(installed);
}

impl Session {
    /// Allocate a fresh table for the open-recursive `body`.
    pub fn memoize<S, K, V, F>(&self, body: F) -> MemoFn<S, K, V>
    where
        S: Clone + 'static,
        K: Clone + Eq + Hash + 'static,
        V: Clone + Eq + Hash + 'static,
        F: Fn(&S, K) -> Comp<V> + 'static,
    {
        let table = Rc::new(Table::new());
        let hook: Rc<dyn AfterRun> = table.clone();
        self.register(Rc::downgrade(&hook));
        MemoFn {
            table,
            body: Rc::new(body),
        }
    }

    /// Memoise a non-recursive function.
    pub fn mem<K, V, F>(&self, f: F) -> Memo<K, V>
    where
        K: Clone + Eq + Hash + 'static,
        V: Clone + Eq + Hash + 'static,
        F: Fn(K) -> Comp<V> + 'static,
    {
        let open = self.memoize(move |_: &(), key| f(key));
        let slot = Slot::empty();
        let table = Rc::clone(&open.table);
        tie(&slot, open, ());
        Memo {
            group: Rc::new(vec![slot.clone() as Rc<dyn Any>]),
            slot,
            table,
        }
    }

    /// Memoised fixed point of a self-recursive body.
    pub fn memo_rec<K, V, F>(&self, body: F) -> Memo<K, V>
    where
        K: Clone + Eq + Hash + 'static,
        V: Clone + Eq + Hash + 'static,
        F: Fn(&Rec<K, V>, K) -> Comp<V> + 'static,
    {
        let open = self.memoize(body);
        let slot = Slot::empty();
        let table = Rc::clone(&open.table);
        tie(&slot, open, Rec(Rc::downgrade(&slot)));
        Memo {
            group: Rc::new(vec![slot.clone() as Rc<dyn Any>]),
            slot,
            table,
        }
    }

    /// Memoised fixed points of two mutually recursive bodies. Each gets its
    /// own table; both bodies see the pair of memoised functions.
    #[allow(clippy::type_complexity)]
    pub fn memo_rec2<K1, V1, K2, V2, F, G>(&self, f: F, g: G) -> (Memo<K1, V1>, Memo<K2, V2>)
    where
        K1: Clone + Eq + Hash + 'static,
        V1: Clone + Eq + Hash + 'static,
        K2: Clone + Eq + Hash + 'static,
        V2: Clone + Eq + Hash + 'static,
        F: Fn(&(Rec<K1, V1>, Rec<K2, V2>), K1) -> Comp<V1> + 'static,
        G: Fn(&(Rec<K1, V1>, Rec<K2, V2>), K2) -> Comp<V2> + 'static,
    {
        let (open_f, open_g) = (self.memoize(f), self.memoize(g));
        let (slot_f, slot_g) = (Slot::empty(), Slot::empty());
        let (table_f, table_g) = (Rc::clone(&open_f.table), Rc::clone(&open_g.table));
        let bundle = (Rec(Rc::downgrade(&slot_f)), Rec(Rc::downgrade(&slot_g)));
        tie(&slot_f, open_f, bundle.clone());
        tie(&slot_g, open_g, bundle);
        let group: Rc<Vec<Rc<dyn Any>>> = Rc::new(vec![
            slot_f.clone() as Rc<dyn Any>,
            slot_g.clone() as Rc<dyn Any>,
        ]);
        (
            Memo {
                slot: slot_f,
                table: table_f,
                group: Rc::clone(&group),
            },
            Memo {
                slot: slot_g,
                table: table_g,
                group,
            },
        )
    }

    /// Memoised fixed points of any number of mutually recursive bodies of a
    /// common type. Body `i` receives the whole group and its own key; the
    /// returned handles are in body order.
    pub fn memo_rec_group<K, V, F>(&self, bodies: Vec<F>) -> Vec<Memo<K, V>>
    where
        K: Clone + Eq + Hash + 'static,
        V: Clone + Eq + Hash + 'static,
        F: Fn(&Rc<[Rec<K, V>]>, K) -> Comp<V> + 'static,
    {
        let opens: Vec<MemoFn<Group<K, V>, K, V>> =
            bodies.into_iter().map(|b| self.memoize(b)).collect();
        let slots: Vec<Rc<Slot<K, V>>> = opens.iter().map(|_| Slot::empty()).collect();
        let bundle: Rc<[Rec<K, V>]> = slots.iter().map(|s| Rec(Rc::downgrade(s))).collect();
        let group: Rc<Vec<Rc<dyn Any>>> =
            Rc::new(slots.iter().map(|s| s.clone() as Rc<dyn Any>).collect());
        opens
            .into_iter()
            .zip(slots)
            .map(|(open, slot)| {
                let table = Rc::clone(&open.table);
                tie(&slot, open, Rc::clone(&bundle));
                Memo {
                    slot,
                    table,
                    group: Rc::clone(&group),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nondet::{choice, fail, pure, sum};

    fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
        v.sort();
        v
    }

    #[test]
    fn chart_is_empty_before_any_call() {
        let s = Session::new();
        let id = s.memo_rec(|_: &Rec<u32, u32>, x| pure(x));
        assert!(id.chart().is_empty());
    }

    #[test]
    fn identity_body_is_tabled() {
        let s = Session::new();
        let id = s.memo_rec(|_: &Rec<u32, u32>, x| pure(x));
        assert_eq!(s.run(&id.call(9)), vec![9]);
        assert_eq!(id.chart(), vec![(9, vec![9])]);
    }

    #[test]
    fn mem_evaluates_each_key_once() {
        let s = Session::new();
        let calls = Rc::new(Cell::new(0));
        let counter = Rc::clone(&calls);
        let inc = s.mem(move |x: i32| {
            counter.set(counter.get() + 1);
            pure(x + 1)
        });
        let twice = inc.call(1).then({
            let inc = inc.clone();
            move |_| inc.call(1)
        });
        assert_eq!(s.run(&twice), vec![2]);
        assert_eq!(calls.get(), 1);
        assert_eq!(inc.evaluations(), 1);
    }

    #[test]
    fn mem_failure_is_recorded() {
        let s = Session::new();
        let nothing = s.mem(|_: i32| fail::<i32>());
        assert!(s.run(&nothing.call(3)).is_empty());
        assert_eq!(nothing.chart(), vec![(3, vec![])]);
    }

    #[test]
    fn mem_suppresses_duplicate_answers() {
        let s = Session::new();
        let dup = s.mem(|x: i32| choice(&pure(x), &pure(x)));
        assert_eq!(s.run(&dup.call(4)), vec![4]);
        assert_eq!(dup.chart(), vec![(4, vec![4])]);
    }

    #[test]
    fn left_recursion_on_same_key_terminates() {
        // p(x) = p(x) + 1 | 0, capped at 5: the left-recursive call never
        // re-enters the body for key 0.
        let s = Session::new();
        let p = s.memo_rec(|p: &Rec<u8, u8>, x: u8| {
            let step = p.call(x).then(|v| if v < 5 { pure(v + 1) } else { fail() });
            choice(&step, &pure(0))
        });
        assert_eq!(sorted(s.run(&p.call(0))), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(p.evaluations(), 1);
    }

    #[test]
    fn late_consumers_receive_earlier_answers() {
        let s = Session::new();
        let gen = s.mem(|n: u8| sum((0..n).map(pure)));
        let g2 = gen.clone();
        let both = gen.call(3).then(move |_| g2.call(3));
        assert_eq!(sorted(s.run(&both)), vec![0, 0, 0, 1, 1, 1, 2, 2, 2]);
        assert_eq!(gen.evaluations(), 1);
    }

    #[test]
    fn mutual_recursion_delegates() {
        let s = Session::new();
        let (f, g) = s.memo_rec2(
            |(_, g): &(Rec<i32, i32>, Rec<i32, i32>), x| g.call(x),
            |_, x| pure(x),
        );
        assert_eq!(s.run(&f.call(5)), vec![5]);
        assert_eq!(f.chart(), vec![(5, vec![5])]);
        assert_eq!(g.chart(), vec![(5, vec![5])]);
    }

    #[test]
    fn tables_persist_across_runs() {
        let s = Session::new();
        let calls = Rc::new(Cell::new(0));
        let counter = Rc::clone(&calls);
        let sq = s.mem(move |x: u64| {
            counter.set(counter.get() + 1);
            pure(x * x)
        });
        assert_eq!(s.run(&sq.call(7)), vec![49]);
        assert_eq!(s.run(&sq.call(7)), vec![49]);
        assert_eq!(calls.get(), 1);
    }

    #[test]
    fn group_of_three() {
        // a -> b -> c -> a, each adding one, capped.
        let s = Session::new();
        type GroupBody = Box<dyn Fn(&Group<u8, u8>, u8) -> Comp<u8>>;
        let bodies: Vec<GroupBody> = (0..3)
            .map(|i| {
                Box::new(move |group: &Rc<[Rec<u8, u8>]>, x: u8| {
                    if x >= 6 {
                        pure(x)
                    } else {
                        group[(i + 1) % 3].call(x + 1)
                    }
                }) as Box<dyn Fn(&Rc<[Rec<u8, u8>]>, u8) -> Comp<u8>>
            })
            .collect();
        let memos = s.memo_rec_group(bodies);
        assert_eq!(s.run(&memos[0].call(0)), vec![6]);
        assert_eq!(memos[0].chart().len(), 3);
    }

    #[test]
    fn dropping_the_handle_releases_the_table() {
        let s = Session::new();
        let memo = s.memo_rec(|r: &Rec<u8, u8>, x: u8| {
            choice(&pure(x), &r.call(x).then(|_| fail()))
        });
        s.run(&memo.call(1));
        let weak = Rc::downgrade(&memo.table);
        drop(memo);
        assert!(weak.upgrade().is_none());
    }
}
