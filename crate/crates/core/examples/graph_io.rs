//! Reading graphs from edge lists or JSON, generating random ones, and
//! checking what kind of graph they are.

use causal_design::bench::{gen_erdos_renyi_dag, GeneratorConfig, Model};
use causal_design::graph::{chain_components, is_chordal, parse_graph, to_edge_list, to_json};
use causal_design::mec::RandomSource;
use causal_design::orient::essential_graph_of;
use causal_design::Result;

fn main() -> Result<()> {
    let text = "# a collider and a chain\na -> c\nb -> c\nc -- d\nd -- e\n";
    let g = parse_graph(text)?;
    println!("parsed: {}", to_json(&g));
    println!("chordal undirected part: {}", is_chordal(&g));

    let dag = gen_erdos_renyi_dag(&GeneratorConfig::new(Model::ErDag, 8, 0.3), &mut RandomSource::new(9, 0))?;
    let essential = essential_graph_of(&dag);
    print!("essential graph of a random DAG:\n{}", to_edge_list(&essential));
    for c in chain_components(&essential).iter().filter(|c| !c.is_trivial()) {
        let names: Vec<String> = c.vertices.iter().map(|&v| essential.name(v)).collect();
        println!("chain component {names:?}");
    }
    Ok(())
}
