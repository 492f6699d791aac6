import matplotlib
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import to_hex


def scc_colors(num_components, cmap="tab20"):
    """
    Hex colour of each SCC index, cycling through a qualitative colormap.

    Parameters
    ----------
    num_components : int
        Number of components to colour.
    cmap : str
        Name of a registered matplotlib colormap.

    Returns
    -------
    list of str
    """
    colormap = matplotlib.colormaps[cmap]
    size = getattr(colormap, "N", 20)
    return [to_hex(colormap(i % size)) for i in range(num_components)]


class PlotDependencyGraph:
    """
    Draw a positive dependency graph with its atoms on a circle.

    Nodes are ordered by atom id and filled with the colour of their SCC;
    edges go from body atoms to head atoms.

    Parameters
    ----------
    graph :
        The DepGraph to draw.
    program :
        The Program the graph was built from, for atom names.
    ax :
        Axes to draw on. A new figure is created when omitted.
    figsize :
        The figure size, used only when `ax` is omitted.
    node_size :
        Marker size of the nodes.
    title :
        The axes title.
    """

    def __init__(
        self,
        graph,
        program,
        ax=None,
        figsize: tuple = (5, 5),
        node_size: float = 600,
        title: str = "dependency graph",
    ):
        self.graph = graph
        self.program = program
        self.node_size = node_size
        self.title = title
        self.nodes = list(graph.nodes)
        self.colors = scc_colors(len(graph.components))
        self.fig, self.ax = self.setup(ax, figsize)

    def positions(self):
        angles = np.linspace(0, 2 * np.pi, len(self.nodes), endpoint=False)
        # start at the top and go clockwise
        xy = np.column_stack((np.sin(angles), np.cos(angles)))
        return {atom: xy[i] for i, atom in enumerate(self.nodes)}

    def setup(self, ax, figsize):
        if ax is None:
            fig, ax = plt.subplots(figsize=figsize)
        else:
            fig = ax.figure
        pos = self.positions()

        for m, n in self.graph.edges():
            if m == n:
                x, y = pos[m]
                ax.plot(x * 1.15, y * 1.15, "o", mfc="none", mec="gray", ms=12)
                continue
            ax.annotate(
                "",
                xy=pos[n],
                xytext=pos[m],
                arrowprops=dict(arrowstyle="-|>", color="gray", shrinkA=12, shrinkB=12),
            )

        for atom in self.nodes:
            x, y = pos[atom]
            ax.scatter(
                x,
                y,
                s=self.node_size,
                color=self.colors[self.graph.scc_id[atom]],
                edgecolors="black",
                zorder=3,
            )
            ax.text(x, y, self.program.atoms[atom], ha="center", va="center", zorder=4)

        ax.set_xlim(-1.4, 1.4)
        ax.set_ylim(-1.4, 1.4)
        ax.set_aspect("equal")
        ax.set_axis_off()
        ax.set_title(self.title)
        return fig, ax


def plot_dep_graph(graph, program, **kwargs):
    """
    Plot a dependency graph with nodes coloured by SCC.

    Parameters
    ----------
    graph : DepGraph
        The graph to draw.
    program : Program
        The program it was built from.
    **kwargs
        Additional keyword arguments to pass to PlotDependencyGraph.

    Returns
    -------
    matplotlib.figure.Figure
    """
    return PlotDependencyGraph(graph, program, **kwargs).fig
