#include "somgen/gray_image.hpp"

#include <string>

namespace somgen {

TileGrid split_tiles(const GrayImage& image, int tile_size) {
    if (tile_size <= 0) throw std::invalid_argument("split_tiles: tile_size must be positive");
    if (image.width % tile_size != 0 || image.height % tile_size != 0) {
        throw std::invalid_argument("split_tiles: tile_size " + std::to_string(tile_size) +
                                    " does not divide " + std::to_string(image.width) + "x" +
                                    std::to_string(image.height));
    }
    TileGrid grid;
    grid.tile_size = tile_size;
    grid.tiles_x = image.width / tile_size;
    grid.tiles_y = image.height / tile_size;
    grid.tiles.reserve(static_cast<std::size_t>(grid.tiles_x) * grid.tiles_y);
    for (int ty = 0; ty < grid.tiles_y; ++ty)
        for (int tx = 0; tx < grid.tiles_x; ++tx)
            grid.tiles.push_back(TileView{&image, tx * tile_size, ty * tile_size, tile_size});
    return grid;
}

} // namespace somgen
