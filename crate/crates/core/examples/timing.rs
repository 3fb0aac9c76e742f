use memotab::bench::{run_bench, slopes, write_table, GrammarSource};
use memotab::grammars::GrammarId;

fn main() {
    let sources: Vec<_> = [GrammarId::Sm, GrammarId::Sml, GrammarId::Smml]
        .into_iter()
        .map(GrammarSource::Builtin)
        .collect();
    let records = run_bench(&sources, &[12, 24, 48, 72, 96], 3);
    write_table(&records, std::io::stdout()).unwrap();
    for (g, s) in slopes(&records) {
        if let Some(s) = s {
            println!("slope {g} {s:.3}");
        }
    }
}
